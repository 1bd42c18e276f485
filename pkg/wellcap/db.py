from __future__ import annotations

import logging
from pathlib import Path

from sqlalchemy import create_engine, event
from sqlalchemy.orm import Session, sessionmaker

from wellcap.models import Base

logger = logging.getLogger(__name__)



def ensure_sqlite_path(database_url: str) -> None:
    if not database_url.startswith("sqlite:///"):
        return
    path = database_url.replace("sqlite:///", "", 1)
    if path and path != ":memory:":
        Path(path).parent.mkdir(parents=True, exist_ok=True)



def _enable_sqlite_foreign_keys(dbapi_connection, _connection_record) -> None:
    # samples.run_id must point at an archived run
    cursor = dbapi_connection.cursor()
    cursor.execute("PRAGMA foreign_keys=ON")
    cursor.close()



def build_session_factory(database_url: str) -> sessionmaker[Session]:
    ensure_sqlite_path(database_url)
    engine = create_engine(database_url, future=True)
    if engine.dialect.name == "sqlite":
        event.listen(engine, "connect", _enable_sqlite_foreign_keys)
    return sessionmaker(bind=engine, autoflush=False, autocommit=False, expire_on_commit=False)



def init_db(session_factory: sessionmaker[Session]) -> None:
    engine = session_factory.kw["bind"]
    Base.metadata.create_all(engine)
    logger.info("Run archive ready at %s", engine.url.render_as_string(hide_password=True))
