"""Exception hierarchy shared by every module."""


class SelfSimError(Exception):
    pass


# --- machines and words -------------------------------------------------
class MalformedMachine(SelfSimError, ValueError):
    pass


class NotInvertible(SelfSimError, ValueError):
    pass


class SymbolNotInAlphabet(SelfSimError, ValueError):
    pass


class ParseError(SelfSimError, ValueError):
    def __init__(self, message, line=None, position=None):
        self.line = line
        self.position = position
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# --- budgets (CLI exit code 3) -------------------------------------------
class BudgetExceeded(SelfSimError, RuntimeError):
    pass


class StateBudgetExceeded(BudgetExceeded):
    pass


class IterationBudgetExceeded(BudgetExceeded):
    """Raised when a reduction that is proven to terminate did not."""


# --- portraits -----------------------------------------------------------
class DepthMismatch(SelfSimError, ValueError):
    pass


class AlphabetMismatch(SelfSimError, ValueError):
    pass


class WordTooLong(SelfSimError, ValueError):
    pass


class LevelTooDeep(SelfSimError, ValueError):
    pass


class NonBinaryAlphabet(SelfSimError, ValueError):
    pass


# --- lamplighter ---------------------------------------------------------
class InvalidModulus(SelfSimError, ValueError):
    pass


class ModulusMismatch(SelfSimError, ValueError):
    pass


class SymbolOutOfRange(SelfSimError, ValueError):
    pass


class InvalidUnit(SelfSimError, ValueError):
    pass


class InvalidParameter(SelfSimError, ValueError):
    pass


class NotSquarefree(InvalidParameter):
    pass


class NotPrime(InvalidParameter):
    pass


class NotCoprime(InvalidParameter):
    pass


class BadDivisor(InvalidParameter):
    pass


class NotInStab(SelfSimError, ValueError):
    pass


class NotAnAutomorphism(SelfSimError, ValueError):
    pass


class NotPositiveAutomorphism(NotAnAutomorphism):
    pass
