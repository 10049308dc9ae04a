"""Exception hierarchy. Every domain error derives from :class:`HyperstarError`."""


class HyperstarError(ValueError):
    pass


class HypergraphError(HyperstarError):
    """Invalid edge, vertex or file content."""


class RegimeError(HyperstarError):
    """Regime is malformed or infeasible at the requested size."""


class CapacityError(HyperstarError):
    pass


class KernelError(HyperstarError):
    pass


class PartitionError(HyperstarError):
    pass


class PreconditionError(HyperstarError):
    pass


class ConvergenceError(HyperstarError):
    pass
