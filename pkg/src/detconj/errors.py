class DetConjError(Exception):
    pass


class DimensionTooLarge(DetConjError, ValueError):
    pass


class StructuralMismatch(DetConjError, ValueError):
    """The matrix is not of the shape (permutation) - (one entry per column)."""


class EngineDisagreement(DetConjError):
    def __init__(self, d, results):
        self.d = d
        self.results = results
        detail = "; ".join(
            f"{r.engine.value}={r.value} primes={r.prime_trace}" for r in results
        )
        super().__init__(f"engines disagree at d={d}: {detail}")


class CheckpointCorruption(DetConjError):
    pass
