from fastapi import BackgroundTasks, FastAPI, File, HTTPException, Query, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field
from typing import Any, Dict, List, Optional
import logging

import config

logger = logging.getLogger(__name__)
logging.basicConfig(level=config.get_log_level("INFO"))

from bounds import BoundTable, bound_table
from code_loader import CodeFileError, decode_code_bytes, parse_code_file
from codes import Code, CodeAnalysis, DirectVerdict, StructuralVerdict, analyze, is_2wfp_structural, is_twfp_direct
from oracles import max_non2cov_sperner
from search import search_max_code
from setfam import symmetric_chain_decomposition
from job_status import cleanup_old_statuses, create_job_status, update_job_status, get_job_status, complete_job_status
import certificate_store

API_VERSION = "1.0.0"
MAX_SCD_LENGTH = 16

app = FastAPI(title="Frameproof Code Toolkit", version=API_VERSION)

# Enable CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=config.get_cors_origins(),
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# Data models
class CodeRequest(BaseModel):
    q: int = 2
    words: List[List[int]] = Field(min_length=1)
    t: int = 2


class VerifyResponse(BaseModel):
    frameproof: bool
    direct: DirectVerdict
    structural: Optional[StructuralVerdict] = None


class ChainResponse(BaseModel):
    n: int
    chains: List[List[List[int]]]
    rendered: List[str]


class SearchRequest(BaseModel):
    n: int
    q: int
    t: int = 2
    budget: Optional[int] = None
    seed: int = 0


class JobResponse(BaseModel):
    job_id: str
    status: str


class JobStatusResponse(BaseModel):
    job_id: str
    kind: str
    status: str
    message: str
    parameters: Dict[str, Any]
    result: Optional[Dict[str, Any]] = None


def _code_from_request(request: CodeRequest) -> Code:
    try:
        return Code(n=len(request.words[0]), q=request.q, words=tuple(tuple(w) for w in request.words))
    except ValueError as e:
        raise HTTPException(status_code=400, detail=f"Invalid code: {e}")


def _verify(code: Code, t: int) -> VerifyResponse:
    direct = is_twfp_direct(code, t)
    structural = None
    if t == 2:
        structural = is_2wfp_structural(code)
        if structural.ok != direct.ok:
            logger.error(f"Verifiers disagree: direct={direct}, structural={structural}")
            raise HTTPException(status_code=500, detail="Internal error: verifiers disagree")
    return VerifyResponse(frameproof=direct.ok, direct=direct, structural=structural)


@app.on_event("startup")
async def startup_event():
    """Create the certificate table"""
    try:
        certificate_store.init_db()
        logger.info("Certificate store ready")
    except Exception as e:
        logger.warning(f"Certificate store unavailable: {e}. Certificate endpoints will fail.")


@app.get("/")
async def root():
    return {"message": "Frameproof Code Toolkit API", "version": API_VERSION,
            "schema_version": config.SCHEMA_VERSION}


@app.post("/api/verify", response_model=VerifyResponse)
def verify_code(request: CodeRequest):
    """Run both verifiers (the structural one only for t = 2)"""
    code = _code_from_request(request)
    try:
        return _verify(code, request.t)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


@app.post("/api/verify/upload", response_model=VerifyResponse)
async def verify_upload(file: UploadFile = File(...), t: int = 2):
    """Verify an uploaded code file"""
    content = await file.read()
    try:
        code = parse_code_file(decode_code_bytes(content))
    except CodeFileError as e:
        raise HTTPException(status_code=400, detail=f"{file.filename}: {e}")
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    try:
        return _verify(code, t)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


@app.post("/api/analyze", response_model=CodeAnalysis)
def analyze_code(request: CodeRequest):
    code = _code_from_request(request)
    try:
        return analyze(code)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


@app.get("/api/bounds", response_model=BoundTable)
async def get_bounds(start: int = 1, end: int = 16):
    try:
        return bound_table(start, end)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


@app.get("/api/scd/{n}", response_model=ChainResponse)
def get_chain_decomposition(n: int):
    """Symmetric chain decomposition of 2^[n]"""
    if not 1 <= n <= MAX_SCD_LENGTH:
        raise HTTPException(status_code=400, detail=f"n must be in 1..{MAX_SCD_LENGTH}")
    decomposition = symmetric_chain_decomposition(n)
    chains = [[[p + 1 for p in range(n) if mask >> p & 1] for mask in chain]
              for chain in decomposition.chains]
    return ChainResponse(n=n, chains=chains, rendered=decomposition.render())


def run_search_job(job_id: str, request: SearchRequest):
    """Background task: run the search and attach the result to the job"""
    update_job_status(job_id, "running", "Searching")
    try:
        result = search_max_code(request.n, request.q, t=request.t, budget=request.budget,
                                 seed=request.seed, workers=1)
        complete_job_status(job_id, True, f"Found a code of size {result.size} ({result.status.value})",
                            result=result.model_dump(mode="json"))
    except Exception as e:
        logger.error(f"Search job {job_id} failed: {e}")
        complete_job_status(job_id, False, f"Error: {str(e)}")


@app.post("/api/search", response_model=JobResponse)
async def start_search(request: SearchRequest, background_tasks: BackgroundTasks):
    """Start a background search job"""
    removed = cleanup_old_statuses()
    if removed:
        logger.info(f"Dropped {removed} job statuses older than a day")
    job_id = create_job_status("search", request.model_dump())
    background_tasks.add_task(run_search_job, job_id, request)
    return JobResponse(job_id=job_id, status="queued")


@app.get("/api/search/status/{job_id}", response_model=JobStatusResponse)
async def get_search_status(job_id: str):
    status = get_job_status(job_id)
    if not status:
        raise HTTPException(status_code=404, detail="Job not found")
    return JobStatusResponse(**status)


@app.post("/api/oracles/maxfam/{n}", response_model=certificate_store.StoredCertificate)
def run_maxfam(n: int, budget: Optional[int] = Query(default=None, ge=1)):
    """Run the non 2-covering Sperner oracle and store its certificate"""
    try:
        certificate = max_non2cov_sperner(n, budget=budget)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    try:
        certificate_id = certificate_store.save_certificate(certificate)
        return certificate_store.get_certificate(certificate_id)
    except Exception as e:
        logger.error(f"Failed to store certificate: {e}")
        raise HTTPException(status_code=500, detail=f"Failed to store certificate: {str(e)}")


@app.get("/api/certificates", response_model=List[certificate_store.StoredCertificate])
def list_certificates(kind: Optional[str] = None, n: Optional[int] = None):
    return certificate_store.list_certificates(kind=kind, n=n)


@app.get("/api/certificates/{certificate_id}", response_model=certificate_store.StoredCertificate)
def get_certificate(certificate_id: int):
    certificate = certificate_store.get_certificate(certificate_id)
    if certificate is None:
        raise HTTPException(status_code=404, detail="Certificate not found")
    return certificate


@app.delete("/api/certificates/{certificate_id}")
def delete_certificate(certificate_id: int):
    if not certificate_store.delete_certificate(certificate_id):
        raise HTTPException(status_code=404, detail="Certificate not found")
    return {"deleted": certificate_id}
