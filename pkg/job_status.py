"""Background job status tracking"""
from typing import Any, Dict, Optional
from datetime import datetime, timedelta
import threading
import uuid
import logging

logger = logging.getLogger(__name__)

# In-memory status store, one process only
_status_store: Dict[str, Dict] = {}
_lock = threading.Lock()


def create_job_status(kind: str, parameters: Dict[str, Any]) -> str:
    """Create a new job status entry and return its id"""
    job_id = str(uuid.uuid4())
    now = datetime.now().isoformat()
    with _lock:
        _status_store[job_id] = {
            "job_id": job_id,
            "kind": kind,
            "parameters": parameters,
            "status": "queued",  # queued -> running -> completed | failed
            "message": "Waiting to start",
            "result": None,
            "created_at": now,
            "updated_at": now,
        }
    return job_id


def update_job_status(job_id: str, status: str, message: str):
    with _lock:
        if job_id in _status_store:
            _status_store[job_id]["status"] = status
            _status_store[job_id]["message"] = message
            _status_store[job_id]["updated_at"] = datetime.now().isoformat()


def get_job_status(job_id: str) -> Optional[Dict]:
    with _lock:
        entry = _status_store.get(job_id)
        return dict(entry) if entry is not None else None


def complete_job_status(job_id: str, success: bool = True, message: str = "Completed",
                        result: Optional[Dict[str, Any]] = None):
    """Mark a job as completed or failed, attaching its result"""
    with _lock:
        if job_id in _status_store:
            _status_store[job_id]["status"] = "completed" if success else "failed"
            _status_store[job_id]["message"] = message
            _status_store[job_id]["result"] = result
            _status_store[job_id]["updated_at"] = datetime.now().isoformat()
    if not success:
        logger.warning(f"Job {job_id} failed: {message}")


def cleanup_old_statuses(max_age_hours: int = 24):
    """Drop entries older than max_age_hours"""
    cutoff = datetime.now() - timedelta(hours=max_age_hours)
    with _lock:
        to_remove = [
            job_id for job_id, status in _status_store.items()
            if datetime.fromisoformat(status["created_at"]) < cutoff
        ]
        for job_id in to_remove:
            del _status_store[job_id]
    return len(to_remove)
