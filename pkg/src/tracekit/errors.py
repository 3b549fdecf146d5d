"""Exception types shared across the toolkit."""


class TracekitError(Exception):
    """Base class for all toolkit errors."""


# -- metric space construction -------------------------------------------------

class AsymmetricTable(TracekitError):
    pass


class NegativeDistance(TracekitError):
    pass


class TriangleViolation(TracekitError):
    def __init__(self, i, j, k, excess):
        self.triple = (i, j, k)
        self.excess = excess
        super().__init__(f"d({i},{j}) > d({i},{k}) + d({k},{j}) by {excess:.3e}")


class EpsOutOfRange(TracekitError):
    pass


class ZeroMassEverywhere(TracekitError):
    pass


class EmptyTargetSet(TracekitError):
    pass


# -- measures ------------------------------------------------------------------

class ZeroMass(TracekitError):
    pass


class NoFeasibleCover(TracekitError):
    pass


class BadParams(TracekitError):
    pass


# -- dyadic structures ---------------------------------------------------------

class OrphanPoint(TracekitError):
    pass


# -- measure sequences ---------------------------------------------------------

class SupportMismatch(TracekitError):
    pass


class ZeroDensity(TracekitError):
    pass


class ThetaOrder(TracekitError):
    pass


class ThetaOutOfRange(TracekitError):
    pass


class GridTooCoarse(TracekitError):
    pass


class EmptyCube(TracekitError):
    pass


# -- functionals / extension ---------------------------------------------------

class SequenceDepthExceeded(TracekitError):
    pass


class UncoveredPoint(TracekitError):
    pass


# -- potentials ----------------------------------------------------------------

class ZeroMuBall(TracekitError):
    pass


class RhsZeroWithPositiveLhs(TracekitError):
    pass
