"""Exception hierarchy shared by every module of the package."""


class RolloutMixError(Exception):
    """Base class for all errors raised by rolloutmix."""


class ValidationError(RolloutMixError):
    """Input violates a structural invariant (CLI exit code 1)."""


class ResourceGuardError(RolloutMixError):
    """A configured resource bound was hit (CLI exit code 2)."""


class NotCovering(ValidationError):
    def __init__(self, uncovered):
        self.uncovered = sorted(uncovered, key=str)
        super().__init__(f"cover sets do not cover states: {self.uncovered}")


class EmptyCoverSet(ValidationError):
    def __init__(self, set_id):
        self.set_id = set_id
        super().__init__(f"cover set {set_id!r} is empty")


class UnknownState(ValidationError):
    def __init__(self, state):
        self.state = state
        super().__init__(f"unknown state {state!r}")


class UnknownCoverSet(ValidationError):
    def __init__(self, set_id):
        self.set_id = set_id
        super().__init__(f"unknown cover set {set_id!r}")


class UnknownSchemaSymbol(UnknownCoverSet):
    """A schema path entry or tail names neither a cover set, a class nor a terminal."""


# Name used by the predictor contract.
SchemaReferencesUnknownSet = UnknownSchemaSymbol


class PseudometricAxiomViolation(ValidationError):
    def __init__(self, axiom, witness):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"pseudo-metric axiom {axiom!r} violated at {witness!r}")


class DuplicateState(ValidationError):
    def __init__(self, state, positions):
        self.state = state
        self.positions = positions
        super().__init__(f"state {state!r} occurs more than once at {positions}")


class DuplicateTerminal(ValidationError):
    def __init__(self, label):
        self.label = label
        super().__init__(f"terminal label {label!r} used by more than one rollout")


class UnknownReference(ValidationError):
    def __init__(self, kind, value, where=None):
        self.kind = kind
        self.value = value
        self.where = where
        loc = f" at {where}" if where else ""
        super().__init__(f"undeclared {kind} {value!r}{loc}")


class MissingState(ValidationError):
    """A declared state never occurs in the population."""

    def __init__(self, states):
        self.states = sorted(states, key=str)
        super().__init__(f"declared states absent from the population: {self.states}")


class IncompatibleTriple(ValidationError):
    def __init__(self, set_id, u, v):
        self.triple = (set_id, u, v)
        super().__init__(f"({set_id!r}, {u!r}, {v!r}) is not a recombination-compatible triple")


class TerminalUnreachable(RolloutMixError):
    def __init__(self, class_id):
        self.class_id = class_id
        super().__init__(f"no terminal label is reachable from class {class_id!r}")


class AllTruncated(RolloutMixError):
    def __init__(self, n, cap):
        super().__init__(f"all {n} sampled rollouts hit the height cap {cap}")


class ClassTooLarge(ResourceGuardError):
    def __init__(self, bound):
        self.bound = bound
        super().__init__(f"equivalence class exceeds the bound of {bound} populations")


class ParseError(ValidationError):
    def __init__(self, location, message):
        self.location = location
        super().__init__(f"{location}: {message}")


class ConfigError(ValidationError):
    pass
