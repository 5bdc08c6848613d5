import math
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Mapping, Optional, Tuple

from ..errors import ConfigurationError


@dataclass(frozen=True)
class BoundParameters:
    c1: float
    c2: float
    m: int
    N: int
    k: float = 0.0
    T: float = math.inf
    mu: float = 1.0
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        if not self.c1 > 0:
            raise ConfigurationError("c1 must be positive.")
        if not self.c2 > 0:
            raise ConfigurationError("c2 must be positive.")
        if self.m < 1:
            raise ConfigurationError("m must be at least 1.")
        if self.N not in (1, 2):
            raise ConfigurationError("N must be 1 or 2.")
        if self.k < 0:
            raise ConfigurationError("k must be non-negative.")
        if not self.T > 0:
            raise ConfigurationError("T must be positive.")
        if self.mu < 1.0:
            raise ConfigurationError("mu must be at least 1.")
        if self.epsilon < 0:
            raise ConfigurationError("epsilon must be non-negative.")

    @property
    def kernel_regime(self) -> bool:
        # second-order Gaussian bounds hold in every dimension
        return self.m == 1 or self.N < 2 * self.m

    def require_kernel_regime(self) -> None:
        if not self.kernel_regime:
            raise ConfigurationError(f"kernel bounds need N < 2m; got N={self.N}, m={self.m}.")

    def with_constants(self, **changes: float) -> "BoundParameters":
        return replace(self, **changes)

    @classmethod
    def from_dict(cls, payload: Mapping[str, object], m: int, N: int) -> "BoundParameters":
        if "c2" not in payload:
            raise ConfigurationError("bound parameters must include 'c2'.")
        try:
            return cls(
                c1=float(payload.get("c1", 1.0)),
                c2=float(payload["c2"]),
                m=int(payload.get("m", m)),
                N=int(payload.get("N", N)),
                k=float(payload.get("k", 0.0)),
                T=float(payload.get("T", math.inf)),
                mu=float(payload.get("mu", 1.0)),
                epsilon=float(payload.get("epsilon", 0.0)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"invalid bound parameters: {exc}") from exc


@dataclass(frozen=True)
class RatioSample:
    index: int
    t: float
    d: float
    value: float
    envelope: float
    pair: int = 0

    @property
    def ratio(self) -> float:
        if self.envelope == 0.0:
            return math.inf if self.value else 0.0
        return abs(self.value) / self.envelope


@dataclass
class BoundReport:
    bound: str
    max_ratio: float
    fitted_c1: float
    fitted_c2: float
    c1: float
    k: float
    samples_checked: int
    violating_sample: Optional[int] = None
    window: Optional[Tuple[float, float]] = None
    samples: List[RatioSample] = field(default_factory=list, repr=False)
    max_log_ratio: Optional[float] = None

    def __post_init__(self) -> None:
        if math.isnan(self.max_ratio):
            raise ConfigurationError("bound report has an undefined ratio.")
        if self.max_log_ratio is None:
            self.max_log_ratio = math.log(self.max_ratio) if self.max_ratio > 0 else -math.inf

    @property
    def passed(self) -> bool:
        # compared in log space: a badly violated bound overflows max_ratio to inf
        return self.max_log_ratio <= math.log(self.c1)

    def to_dict(self) -> Dict[str, object]:
        return {
            "bound": self.bound,
            "fitted_c2": self.fitted_c2,
            "fitted_c1": self.fitted_c1,
            "k": self.k,
            "samples": self.samples_checked,
            "max_ratio": self.max_ratio,
            "max_log_ratio": self.max_log_ratio,
            "window": list(self.window) if self.window else None,
            "pass": self.passed,
            "violating_sample": self.violating_sample,
        }

    def ratio_rows(self) -> List[Dict[str, object]]:
        rows = []
        for sample in self.samples:
            row = asdict(sample)
            row["ratio"] = sample.ratio
            row["bound"] = self.bound
            rows.append({key: (f"{value:.10g}" if isinstance(value, float) else value) for key, value in row.items()})
        return rows


RATIO_COLUMNS = ("bound", "index", "pair", "t", "d", "value", "envelope", "ratio")
