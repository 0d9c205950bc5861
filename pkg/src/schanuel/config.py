"""Runtime settings for schanuel."""

import os
import tempfile


def _positive_int(name: str, value) -> int:
    """Coerce a setting to a positive integer.

    Parameters
    ----------
    name: str
        Setting name, used in the error message.
    value: Any
        Raw value from a keyword argument, the environment or a default.

    Returns
    -------
    The value as an int.
    """
    try:
        out = int(value)
    except (TypeError, ValueError) as exc:
        raise ValueError(
            f"Setting {name} must be a positive integer, input: {value}"
        ) from exc
    if out < 1:
        raise ValueError(
            f"Setting {name} must be a positive integer, input: {value}")
    return out


class Settings:
    """Numeric and proof-search configuration."""
    def __init__(self, **kwargs):
        """Initializer for Settings.

        Every value is read from 1) kwarg, 2) env, 3) default.

        Parameters
        ----------
        **precision: int (default=256, env SCHANUEL_PREC)
            Working precision in bits for evaluation and relation search.
        **height: int (default=10000, env SCHANUEL_HEIGHT)
            Maximum absolute coefficient of a searched integer relation.
        **degree_cap: int (default=64, env SCHANUEL_DEGCAP)
            Largest admissible minimal polynomial degree.
        **start_precision: int (default=64)
            First precision tried by certify_nonzero.
        **max_doublings: int (default=12)
            Number of precision doublings before giving up.
        **precision_cap: int (default=2**18)
            Hard ceiling on any working precision.
        **pslq_max_steps: int (default=20000, env SCHANUEL_PSLQ_STEPS)
            Iteration ceiling handed to PSLQ.
        **depth_budget: int (default=4, env SCHANUEL_DEPTH)
            Recursion budget of check_q_linear_independence.
        **registry_path: str (default=None, env SCHANUEL_REGISTRY)
            Optional algebraic constant registry file.
        **trace_root: str (default=<tmpdir>/schanuel, env SCHANUEL_TRACE_ROOT)
            Root folder of the local trace store.
        **max_traces_in_script: int (default=50)
            Traces kept per script by the trace store.
        **max_facts: int (default=200000, env SCHANUEL_MAX_FACTS)
            Knowledge base size at which derivation stops with
            BudgetExhaustedError.
        """
        self.precision = _positive_int("precision", kwargs.get(
            "precision", os.environ.get("SCHANUEL_PREC", 256)))
        self.height = _positive_int("height", kwargs.get(
            "height", os.environ.get("SCHANUEL_HEIGHT", 10000)))
        self.degree_cap = _positive_int("degree_cap", kwargs.get(
            "degree_cap", os.environ.get("SCHANUEL_DEGCAP", 64)))
        self.start_precision = _positive_int(
            "start_precision", kwargs.get("start_precision", 64))
        self.max_doublings = int(kwargs.get("max_doublings", 12))
        self.precision_cap = _positive_int(
            "precision_cap", kwargs.get("precision_cap", 2**18))
        self.pslq_max_steps = _positive_int("pslq_max_steps", kwargs.get(
            "pslq_max_steps", os.environ.get("SCHANUEL_PSLQ_STEPS", 20000)))
        self.depth_budget = int(kwargs.get(
            "depth_budget", os.environ.get("SCHANUEL_DEPTH", 4)))
        self.registry_path = kwargs.get(
            "registry_path", os.environ.get("SCHANUEL_REGISTRY"))
        self.trace_root = kwargs.get(
            "trace_root", os.environ.get(
                "SCHANUEL_TRACE_ROOT",
                os.path.join(tempfile.gettempdir(), "schanuel")
            )
        )
        self.max_traces_in_script = int(
            kwargs.get("max_traces_in_script", 50))
        self.max_facts = _positive_int("max_facts", kwargs.get(
            "max_facts", os.environ.get("SCHANUEL_MAX_FACTS", 200000)))
        if self.max_doublings < 0:
            raise ValueError(
                "Setting max_doublings must be non-negative, input: "
                + str(self.max_doublings))
        if self.depth_budget < 0:
            raise ValueError(
                "Setting depth_budget must be non-negative, input: "
                + str(self.depth_budget))

    def snapshot(self) -> dict:
        """Settings that influence proof content, for trace headers.

        Returns
        -------
        A JSON-serializable dict.
        """
        return {
            "precision": self.precision,
            "height": self.height,
            "degree_cap": self.degree_cap,
            "start_precision": self.start_precision,
            "max_doublings": self.max_doublings,
            "depth_budget": self.depth_budget,
        }
