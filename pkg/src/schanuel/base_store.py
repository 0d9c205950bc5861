"""Base class for proof trace stores."""

import abc
from datetime import datetime

from .trace import ProofTrace

TRACE_SUFFIX = ".jsonl"


class BaseTraceStore(abc.ABC):
    """BaseTraceStore class, used to enforce I/O for trace archives.

    Traces are filed under the name of the script that produced them, one
    JSON Lines file per trace, named by publication timestamp.
    """
    def __init__(self, **kwargs):
        """Initializer for the base class.

        Parameters
        ----------
        **max_traces_in_script: int (default=50)
            The maximum number of traces kept per script before the oldest
            are deleted automatically
        """
        self.max_traces_in_script = kwargs.get('max_traces_in_script', 50)

    @abc.abstractmethod
    def publish(self, script: str, trace: ProofTrace) -> str:
        """Archive a trace under a script name.

        Parameters
        ----------
        script: str
            Script name, e.g. "cor4".
        trace: ProofTrace
            The trace to store.

        Returns
        -------
        The location of the stored file.
        """
        raise NotImplementedError

    @abc.abstractmethod
    def retire(self, script: str, num_keep: int = None):
        """Delete old traces of a script.

        Parameters
        ----------
        script: str
            Script to clean up.
        num_keep: int (default=None)
            Number of traces to keep. None keeps max_traces_in_script
        """
        raise NotImplementedError

    @abc.abstractmethod
    def recall(self, script: str, num_retrieve: int = None) -> list:
        """Get the most recent N traces of a script.

        Parameters
        ----------
        script: str
            Script to recall traces for.
        num_retrieve: int (default=None)
            Number of traces to retrieve. None returns max_traces_in_script
        Returns
        -------
        A list of ProofTrace, oldest first
        """
        raise NotImplementedError

    def _new_trace_name(self) -> str:
        """File name for a trace published now.

        The stem is the publication time as %Y%m%d-%H%M%S%f, so names sort
        oldest first within a script folder.
        """
        return datetime.now().strftime("%Y%m%d-%H%M%S%f") + TRACE_SUFFIX

    def _newest(self, names, num_retrieve: int = None) -> list:
        """The last `num_retrieve` trace files of a folder listing, in order.

        Raises
        ------
        ValueError when the count is below one.
        """
        count = self.max_traces_in_script if num_retrieve is None \
            else num_retrieve
        if count < 1:
            raise ValueError("Traces to recall must be at least 1, got "
                             f"{count}")
        traces = sorted(n for n in names if str(n).endswith(TRACE_SUFFIX))
        return traces[-count:]

    def _expired(self, names, num_keep: int = None) -> list:
        """Trace files beyond the newest `num_keep`; none when negative."""
        keep = self.max_traces_in_script if num_keep is None else num_keep
        if keep < 0:
            return []
        traces = sorted(n for n in names if str(n).endswith(TRACE_SUFFIX))
        return traces[:-keep or None]
