from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import datetime
from typing import Sequence

from sqlalchemy import select
from sqlalchemy.orm import Session, sessionmaker

from wellcap.models import RunRecord, SampleRecord

logger = logging.getLogger(__name__)


@dataclass
class ArchivedSample:
    sample_index: int
    degree: int
    provenance: str
    strategy: str
    bound: str
    verdict: str


@dataclass
class RunSummary:
    run_id: int
    command: str
    radius: str
    seed: int | None
    exit_code: int
    summary: str
    created_at: datetime
    samples_total: int
    samples_violated: int


class RunArchive:
    def __init__(self, session_factory: sessionmaker[Session]) -> None:
        self.session_factory = session_factory

    def record(
        self,
        command: str,
        problem_digest: str,
        report_json: str,
        exit_code: int,
        summary: str = "",
        problem_path: str = "",
        radius: str = "",
        seed: int | None = None,
        samples: Sequence[ArchivedSample] = (),
    ) -> int:
        with self.session_factory() as db:
            run = RunRecord(
                command=command,
                problem_digest=problem_digest,
                problem_path=problem_path,
                radius=radius,
                seed=seed,
                exit_code=exit_code,
                summary=summary,
                report_json=report_json,
                created_at=datetime.utcnow(),
            )
            db.add(run)
            db.flush()
            for sample in samples:
                db.add(
                    SampleRecord(
                        run_id=run.id,
                        sample_index=sample.sample_index,
                        degree=sample.degree,
                        provenance=sample.provenance,
                        strategy=sample.strategy,
                        bound=sample.bound,
                        verdict=sample.verdict,
                    )
                )
            db.commit()
            logger.info("Archived %s run id=%s (%s samples, exit=%s)", command, run.id, len(samples), exit_code)
            return run.id

    def history(self, problem_digest: str, limit: int = 20) -> list[RunSummary]:
        with self.session_factory() as db:
            runs = db.scalars(
                select(RunRecord)
                .where(RunRecord.problem_digest == problem_digest)
                .order_by(RunRecord.created_at.desc(), RunRecord.id.desc())
                .limit(limit)
            ).all()
            out = []
            for run in runs:
                verdicts = db.scalars(select(SampleRecord.verdict).where(SampleRecord.run_id == run.id)).all()
                out.append(
                    RunSummary(
                        run_id=run.id,
                        command=run.command,
                        radius=run.radius,
                        seed=run.seed,
                        exit_code=run.exit_code,
                        summary=run.summary,
                        created_at=run.created_at,
                        samples_total=len(verdicts),
                        samples_violated=sum(1 for v in verdicts if v == "violated"),
                    )
                )
            return out

    def samples(self, run_id: int) -> list[ArchivedSample]:
        with self.session_factory() as db:
            rows = db.scalars(
                select(SampleRecord).where(SampleRecord.run_id == run_id).order_by(SampleRecord.sample_index)
            ).all()
            return [
                ArchivedSample(r.sample_index, r.degree, r.provenance, r.strategy, r.bound, r.verdict)
                for r in rows
            ]
