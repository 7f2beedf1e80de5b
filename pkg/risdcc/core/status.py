"""
Experiment run status tracking
"""

import threading
import uuid
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any


class RunStatus(Enum):
    """Run status enumeration"""
    INITIALIZING = "initializing"
    SIMULATING = "simulating"
    OPTIMIZING = "optimizing"
    COMPLETED = "completed"
    ERROR = "error"


@dataclass
class RunProgressInfo:
    """Progress through the SNR points or optimizer evaluations of a run"""
    current_step: int = 0
    total_steps: int = 0
    description: str = ""

    @property
    def progress_percentage(self) -> float:
        if self.total_steps == 0:
            return 0.0
        return (self.current_step / self.total_steps) * 100.0


@dataclass
class RunInfo:
    """Complete run information"""
    run_id: str
    command: str
    status: RunStatus
    start_time: datetime
    end_time: datetime | None = None
    parameters: dict[str, Any] = field(default_factory=dict)
    progress: RunProgressInfo = field(default_factory=RunProgressInfo)
    error_message: str | None = None
    memory_usage: dict[str, float] = field(default_factory=dict)

    @property
    def duration_seconds(self) -> float:
        end = self.end_time or datetime.now(timezone.utc)
        return (end - self.start_time).total_seconds()


class RunStatusManager:
    """Thread-safe run status manager"""

    def __init__(self, max_history: int = 32):
        self._lock = threading.RLock()
        self._current: RunInfo | None = None
        self._history: list[RunInfo] = []
        self._max_history = max_history

    def start_run(self, command: str, parameters: dict[str, Any] | None = None) -> str:
        with self._lock:
            run_id = str(uuid.uuid4())[:8]
            self._current = RunInfo(
                run_id=run_id,
                command=command,
                status=RunStatus.INITIALIZING,
                start_time=datetime.now(timezone.utc),
                parameters=parameters or {},
            )
            return run_id

    def update_status(
        self,
        run_id: str,
        status: RunStatus,
        description: str = "",
        current_step: int | None = None,
        total_steps: int | None = None,
        memory_usage: dict[str, float] | None = None,
        error_message: str | None = None,
    ):
        """Update run status and progress; unknown run ids are ignored"""
        with self._lock:
            if not self._current or self._current.run_id != run_id:
                return
            self._current.status = status
            if description:
                self._current.progress.description = description
            if current_step is not None:
                self._current.progress.current_step = current_step
            if total_steps is not None:
                self._current.progress.total_steps = total_steps
            if memory_usage:
                self._current.memory_usage.update(memory_usage)
            if error_message:
                self._current.error_message = error_message
            if status in (RunStatus.COMPLETED, RunStatus.ERROR):
                self._current.end_time = datetime.now(timezone.utc)
                self._finalize()

    def _finalize(self):
        self._history.append(self._current)
        self._history = self._history[-self._max_history:]
        self._current = None

    @staticmethod
    def _to_dict(run: RunInfo) -> dict[str, Any]:
        info = asdict(run)
        info['status'] = run.status.value
        info['start_time'] = run.start_time.timestamp()
        if run.end_time:
            info['end_time'] = run.end_time.timestamp()
        info['duration_seconds'] = run.duration_seconds
        info['progress']['progress_percentage'] = run.progress.progress_percentage
        return info

    def get_run(self, run_id: str) -> dict[str, Any] | None:
        """The running or a recently finished run, or None once it left the history"""
        with self._lock:
            if self._current and self._current.run_id == run_id:
                return self._to_dict(self._current)
            for run in reversed(self._history):
                if run.run_id == run_id:
                    return self._to_dict(run)
            return None


# Global status manager instance
_status_manager = RunStatusManager()


def start_run(command: str, parameters: dict[str, Any] | None = None) -> str:
    """Start tracking a new run"""
    return _status_manager.start_run(command, parameters)


def update_run_status(
    run_id: str,
    status: RunStatus,
    description: str = "",
    current_step: int | None = None,
    total_steps: int | None = None,
    memory_usage: dict[str, float] | None = None,
    error_message: str | None = None,
):
    _status_manager.update_status(run_id, status, description, current_step, total_steps, memory_usage, error_message)


def get_run(run_id: str) -> dict[str, Any] | None:
    return _status_manager.get_run(run_id)
