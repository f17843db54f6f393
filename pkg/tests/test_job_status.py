from datetime import datetime, timedelta

import job_status
from job_status import cleanup_old_statuses, complete_job_status, create_job_status, get_job_status, update_job_status


def test_lifecycle():
    job_id = create_job_status("search", {"n": 3})
    assert get_job_status(job_id)["status"] == "queued"
    update_job_status(job_id, "running", "Searching")
    assert get_job_status(job_id)["message"] == "Searching"
    complete_job_status(job_id, True, "done", result={"size": 4})
    status = get_job_status(job_id)
    assert status["status"] == "completed"
    assert status["result"] == {"size": 4}


def test_failure():
    job_id = create_job_status("search", {})
    complete_job_status(job_id, False, "Error: boom")
    assert get_job_status(job_id)["status"] == "failed"


def test_unknown_job():
    assert get_job_status("missing") is None
    update_job_status("missing", "running", "ignored")
    assert get_job_status("missing") is None


def test_returned_status_is_a_copy():
    job_id = create_job_status("search", {})
    get_job_status(job_id)["status"] = "tampered"
    assert get_job_status(job_id)["status"] == "queued"


def test_cleanup_old_statuses():
    old = create_job_status("search", {})
    fresh = create_job_status("search", {})
    job_status._status_store[old]["created_at"] = (datetime.now() - timedelta(hours=30)).isoformat()
    assert cleanup_old_statuses(max_age_hours=24) >= 1
    assert get_job_status(old) is None
    assert get_job_status(fresh) is not None
