"""SQLite persistence for oracle certificates"""
import logging
from datetime import datetime
from typing import List, Optional

from sqlalchemy import JSON, DateTime, Integer, String, create_engine, select
from sqlalchemy.engine import Engine
from sqlalchemy.orm import DeclarativeBase, Mapped, Session, mapped_column

import config
from oracles import OracleCertificate

logger = logging.getLogger(__name__)

# Engine singleton, created on first use
_engine: Optional[Engine] = None


class Base(DeclarativeBase):
    pass


class CertificateRecord(Base):
    __tablename__ = "certificates"

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    kind: Mapped[str] = mapped_column(String(32), index=True)
    n: Mapped[int] = mapped_column(Integer, index=True)
    q: Mapped[Optional[int]] = mapped_column(Integer, nullable=True)
    t: Mapped[Optional[int]] = mapped_column(Integer, nullable=True)
    optimum: Mapped[int] = mapped_column(Integer)
    status: Mapped[str] = mapped_column(String(16))
    payload: Mapped[dict] = mapped_column(JSON)
    created_at: Mapped[datetime] = mapped_column(DateTime, default=datetime.now)


class StoredCertificate(OracleCertificate):
    id: int
    created_at: datetime


def get_engine() -> Engine:
    """Get or create the engine for WFP_DATABASE_URL"""
    global _engine
    if _engine is None:
        url = config.get_database_url()
        _engine = create_engine(url)
        logger.info(f"Opened certificate store at {url}")
    return _engine


def reset_engine():
    """Dispose the engine so the next call re-reads the configuration"""
    global _engine
    if _engine is not None:
        _engine.dispose()
    _engine = None


def init_db():
    """Create the certificates table if it does not exist"""
    Base.metadata.create_all(get_engine())


def _to_stored(record: CertificateRecord) -> StoredCertificate:
    return StoredCertificate(id=record.id, created_at=record.created_at, **record.payload)


def save_certificate(certificate: OracleCertificate) -> int:
    """Persist a certificate and return its id"""
    init_db()
    record = CertificateRecord(
        kind=certificate.kind.value,
        n=certificate.n,
        q=certificate.q,
        t=certificate.t,
        optimum=certificate.optimum,
        status=certificate.status.value,
        payload=certificate.model_dump(mode="json"),
    )
    with Session(get_engine()) as session:
        session.add(record)
        session.commit()
        logger.info(f"Stored {record.kind} certificate for n={record.n} as id {record.id}")
        return record.id


def get_certificate(certificate_id: int) -> Optional[StoredCertificate]:
    init_db()
    with Session(get_engine()) as session:
        record = session.get(CertificateRecord, certificate_id)
        return _to_stored(record) if record is not None else None


def list_certificates(kind: Optional[str] = None, n: Optional[int] = None) -> List[StoredCertificate]:
    """Stored certificates, oldest first, optionally filtered by kind and n"""
    init_db()
    query = select(CertificateRecord).order_by(CertificateRecord.id)
    if kind is not None:
        query = query.where(CertificateRecord.kind == kind)
    if n is not None:
        query = query.where(CertificateRecord.n == n)
    with Session(get_engine()) as session:
        return [_to_stored(record) for record in session.scalars(query)]


def delete_certificate(certificate_id: int) -> bool:
    """Delete a certificate; False when it does not exist"""
    init_db()
    with Session(get_engine()) as session:
        record = session.get(CertificateRecord, certificate_id)
        if record is None:
            return False
        session.delete(record)
        session.commit()
        return True
