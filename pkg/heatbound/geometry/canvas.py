from typing import List

import numpy as np
from wcwidth import wcwidth

from ..errors import ConfigurationError
from .domain import Domain

FILL = "█"
EDGE = "·"
EMPTY = " "


class Canvas:

    def __init__(self, width: int = 80, height: int = 40):
        self.width = width
        self.height = height
        self.grid = [[EMPTY for _ in range(width)] for _ in range(height)]
        self.cell_widths = [[1 for _ in range(width)] for _ in range(height)]
        self.min_x = width
        self.max_x = 0
        self.min_y = height
        self.max_y = 0

    def set(self, x: int, y: int, char: str) -> None:
        if not (0 <= y < self.height and 0 <= x < self.width):
            raise ConfigurationError(
                f"Preview content exceeds canvas bounds at ({x}, {y})."
            )
        width = max(1, wcwidth(char))
        self.grid[y][x] = char
        self.cell_widths[y][x] = width
        for i in range(1, width):
            if x + i < self.width:
                self.grid[y][x + i] = EMPTY
                self.cell_widths[y][x + i] = 0
        self.min_x = min(self.min_x, x)
        self.max_x = max(self.max_x, x + width - 1)
        self.min_y = min(self.min_y, y)
        self.max_y = max(self.max_y, y)

    def get(self, x: int, y: int) -> str:
        if 0 <= y < self.height and 0 <= x < self.width:
            if self.cell_widths[y][x] == 0:
                return EMPTY
            return self.grid[y][x]
        return EMPTY

    def render(self, crop: bool = True) -> str:
        if crop and self.max_x >= self.min_x:
            rows = range(self.min_y, self.max_y + 1)
            cols = range(self.min_x, self.max_x + 1)
        else:
            rows = range(self.height)
            cols = range(self.width)
        lines: List[str] = []
        for y in rows:
            parts = [self.grid[y][x] for x in cols if self.cell_widths[y][x] != 0]
            lines.append("".join(parts).rstrip())
        return "\n".join(lines)


def render_preview(domain: Domain, columns: int = 40) -> str:
    """ASCII picture of the domain mask; terminal cells are about twice as tall
    as they are wide, so rows are sampled at half the column density."""
    if columns < 8:
        raise ConfigurationError("preview needs at least 8 columns.")
    lo, hi = domain.bounding_box
    if domain.dimension == 1:
        xs = np.linspace(lo[0], hi[0], columns)
        canvas = Canvas(width=columns, height=1)
        inside = domain.contains(xs)
        for i, flag in enumerate(inside):
            canvas.set(i, 0, FILL if flag else EDGE)
        return canvas.render()

    rows = max(4, columns // 2)
    xs = np.linspace(lo[0], hi[0], columns)
    ys = np.linspace(hi[1], lo[1], rows)
    mesh_x, mesh_y = np.meshgrid(xs, ys)
    inside = domain.contains(np.column_stack((mesh_x.ravel(), mesh_y.ravel()))).reshape(rows, columns)
    canvas = Canvas(width=columns, height=rows)
    for y in range(rows):
        for x in range(columns):
            canvas.set(x, y, FILL if inside[y, x] else EDGE)
    return canvas.render()
