"""Implementation of S3TraceStore."""

import logging
import os

import s3fs

from .base_store import BaseTraceStore
from .trace import ProofTrace

logger = logging.getLogger(__name__)


class S3TraceStore(BaseTraceStore):
    """Trace store that uses an S3 filesystem"""
    def __init__(self, **kwargs):
        """Initializer for S3TraceStore.

        Parameters
        ----------
        **root_path: str (default=schanuel, env SCHANUEL_TRACE_ROOT)
            The bucket folder holding one subfolder of traces per script
        """
        # Get root_path from 1) Kwarg, 2) Env, 3) default
        super().__init__(**kwargs)
        self.root_path = kwargs.get(
            "root_path",
            os.environ.get("SCHANUEL_TRACE_ROOT", "schanuel")
        )
        self.s3 = s3fs.S3FileSystem(
            client_kwargs={"endpoint_url": os.environ["S3_ENDPOINT"]}
        )

        if not self.s3.exists(self.root_path):
            self.s3.mkdir(self.root_path, create_parents=True)

    def _script_folder(self, script: str) -> str:
        return "/".join([self.root_path, script])

    def publish(self, script: str, trace: ProofTrace) -> str:
        """Upload a trace file and retire old ones.

        Parameters
        ----------
        script: str
            Script name the trace is filed under.
        trace: ProofTrace
            The trace to store.

        Returns
        -------
        The key of the written object.
        """
        folder = self._script_folder(script)
        if not self.s3.exists(folder):
            self.s3.mkdir(folder)
        key = "/".join([folder, self._new_trace_name()])
        with self.s3.open(key, "wt") as f:
            f.write(trace.to_jsonl())
        logger.debug("Published %s trace to %s", script, key)

        self.retire(script)
        return key

    def retire(self, script: str, num_keep: int = None) -> None:
        """Delete all but the newest traces of a script; see BaseTraceStore."""
        folder = self._script_folder(script)
        if not self.s3.exists(folder):
            return
        expired = self._expired(self.s3.ls(folder), num_keep)
        if expired:
            self.s3.rm(expired)

    def recall(self, script: str, num_retrieve: int = None) -> list:
        """Download the newest traces of a script, oldest first."""
        folder = self._script_folder(script)
        keys = self.s3.ls(folder) if self.s3.exists(folder) else []
        out = []
        for key in self._newest(keys, num_retrieve):
            with self.s3.open(key, "rt") as f:
                out.append(ProofTrace.from_jsonl(f.read()))
        return out
