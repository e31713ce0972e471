"""Exceptions shared across the package."""


class UnattainableTarget(ValueError):
    """The requested consistency probability cannot be reached.

    ``supremum`` is the largest CP available under the requested structure,
    so callers can report how far off the target is.
    """

    def __init__(self, message: str, supremum: float):
        super().__init__(f"{message} (supremum CP {supremum:.4f})")
        self.supremum = supremum


class EnumerationBudgetExceeded(RuntimeError):
    """Exact enumeration would evaluate more terms than allowed."""

    def __init__(self, terms: float, budget: float):
        super().__init__(
            f"exact enumeration needs ~{terms:.3g} terms, budget is {budget:.3g}; "
            "use the Monte Carlo method instead"
        )
        self.terms = terms
        self.budget = budget


class DegenerateSimulation(RuntimeError):
    """No replication rejected the null hypothesis, so CP is undefined."""
