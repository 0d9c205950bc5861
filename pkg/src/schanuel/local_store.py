"""Implementation of LocalTraceStore"""

import logging
import os
import tempfile
from pathlib import Path

from .base_store import BaseTraceStore
from .trace import ProofTrace

logger = logging.getLogger(__name__)


class LocalTraceStore(BaseTraceStore):
    """Trace store that uses a local filesystem"""
    def __init__(self, **kwargs):
        """Initializer for LocalTraceStore.

        Parameters
        ----------
        **root_path: str (default=<tmpdir>/schanuel, env SCHANUEL_TRACE_ROOT)
            The folder holding one subfolder of traces per script
        """
        # Get root_path from 1) Kwarg, 2) Env, 3) default
        super().__init__(**kwargs)
        self.root_path = kwargs.get(
            "root_path", os.environ.get(
                "SCHANUEL_TRACE_ROOT",
                os.path.join(tempfile.gettempdir(), "schanuel")
            )
        )
        Path(self.root_path).mkdir(parents=True, exist_ok=True)

    def _script_folder(self, script: str) -> Path:
        return Path(self.root_path) / script

    def publish(self, script: str, trace: ProofTrace) -> str:
        """Write a trace file and retire old ones.

        Parameters
        ----------
        script: str
            Script name the trace is filed under.
        trace: ProofTrace
            The trace to store.

        Returns
        -------
        The path of the written file.
        """
        folder = self._script_folder(script)
        folder.mkdir(exist_ok=True)
        file_path = folder / self._new_trace_name()
        file_path.write_text(trace.to_jsonl(), encoding="utf-8")
        logger.debug("Published %s trace to %s", script, file_path)

        self.retire(script)
        return str(file_path)

    def retire(self, script: str, num_keep: int = None) -> None:
        """Delete all but the newest traces of a script; see BaseTraceStore."""
        folder = self._script_folder(script)
        if not folder.is_dir():
            return
        for name in self._expired(os.listdir(folder), num_keep):
            (folder / name).unlink()

    def recall(self, script: str, num_retrieve: int = None) -> list:
        """Read back the newest traces of a script, oldest first."""
        folder = self._script_folder(script)
        names = os.listdir(folder) if folder.is_dir() else []
        newest = self._newest(names, num_retrieve)
        return [ProofTrace.read(str(folder / name)) for name in newest]
