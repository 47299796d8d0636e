import logging
import threading
from typing import Any, Dict, List

# Set up logging
logger = logging.getLogger(__name__)


class ReportProgressTracker:
    """Per-task status for one report bundle; safe to update from worker threads."""

    def __init__(self, bundle: str = ""):
        self.bundle = bundle
        self._lock = threading.Lock()
        self._store: Dict[str, Dict[str, Any]] = {}

    def update_progress(self, task_id: str, message: str, percentage: int, status: str = "progress"):
        """Update progress for a task"""
        if not task_id:
            return
        with self._lock:
            self._store[task_id] = {
                "status": status,
                "message": message,
                "percentage": percentage,
            }
        logger.info(f"🔄 {self.bundle} - {task_id}: {percentage}% {message}")

    def set_completed(self, task_id: str, message: str, files: List[str] = None):
        """Mark task as completed"""
        if not task_id:
            return
        with self._lock:
            self._store[task_id] = {
                "status": "completed",
                "message": message,
                "percentage": 100,
                "files": list(files or []),
            }
        logger.info(f"✅ {self.bundle} - {task_id}: {message}")

    def set_error(self, task_id: str, message: str):
        """Mark task as failed"""
        if not task_id:
            return
        with self._lock:
            self._store[task_id] = {
                "status": "error",
                "message": message,
                "percentage": 0,
            }
        logger.error(f"❌ {self.bundle} - {task_id}: {message}")

    def get(self, task_id: str) -> Dict[str, Any]:
        with self._lock:
            return dict(self._store.get(task_id, {}))

    @property
    def failed(self) -> List[str]:
        with self._lock:
            return [task for task, entry in self._store.items() if entry["status"] == "error"]

    @property
    def completed(self) -> List[str]:
        with self._lock:
            return [task for task, entry in self._store.items() if entry["status"] == "completed"]

    def all_failed(self) -> bool:
        with self._lock:
            return bool(self._store) and all(entry["status"] == "error" for entry in self._store.values())

    def manifest(self) -> Dict[str, Any]:
        """Every task with its final status, in the order tasks were first recorded."""
        with self._lock:
            tasks = {task: dict(entry) for task, entry in self._store.items()}
        return {
            "bundle": self.bundle,
            "total": len(tasks),
            "completed": sum(1 for entry in tasks.values() if entry["status"] == "completed"),
            "failed": sum(1 for entry in tasks.values() if entry["status"] == "error"),
            "tasks": tasks,
        }
