"""Exception types. Every error carries a short machine-readable ``code``."""


class ProdChanError(ValueError):
    code = "error"


class ShapeError(ProdChanError):
    code = "shape"


class NotHermitianError(ProdChanError):
    code = "not-hermitian"


class InvalidStateError(ProdChanError):
    code = "not-state"


class NoSplitError(ProdChanError):
    code = "no-split"


class RankError(ProdChanError):
    code = "rank"


class NotCPError(ProdChanError):
    code = "not-cp"


class NotTPError(ProdChanError):
    code = "not-tp"


class NotCPTPError(ProdChanError):
    code = "not-cptp"


class ParamError(ProdChanError):
    code = "param"


class LabelUnconfirmedError(ProdChanError):
    code = "label-unconfirmed"
