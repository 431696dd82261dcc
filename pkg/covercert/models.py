from enum import Enum as PyEnum


class CellKind(PyEnum):
    vertex = "vertex"
    edge = "edge"
    face = "face"
    tet = "tet"


class DiscKind(PyEnum):
    triangle = "tri"
    quad = "quad"


class Verdict(PyEnum):
    agree = "AGREE"
    inconclusive = "INCONCLUSIVE"
    theorem_violation = "THEOREM_VIOLATION"
    unsound = "UNSOUND"


class OutputFormat(PyEnum):
    human = "human"
    records = "records"


class Subcommand(PyEnum):
    validate = "validate"
    homology = "homology"
    presentation = "presentation"
    quotients = "quotients"
    cover = "cover"
    cheeger = "cheeger"
    certify = "certify"
    surface = "surface"
    sweep = "sweep"
    ledger = "ledger"
    pigeonhole = "pigeonhole"
    fibring = "fibring"
    census = "census"
