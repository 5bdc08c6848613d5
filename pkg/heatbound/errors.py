class HeatboundError(Exception):
    pass


class ConfigurationError(HeatboundError):
    pass


class GeometryError(HeatboundError):
    pass


class ReachError(GeometryError):
    pass


class ProjectionError(GeometryError):
    pass


class DisconnectedError(GeometryError):
    pass


class QuadratureError(HeatboundError):
    pass


class BudgetExceededError(HeatboundError):
    pass
