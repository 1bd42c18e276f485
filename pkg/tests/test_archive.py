from __future__ import annotations

import pytest

from wellcap.archive import ArchivedSample, RunArchive
from wellcap.db import build_session_factory, init_db


@pytest.fixture
def archive(tmp_path):
    session_factory = build_session_factory(f"sqlite:///{tmp_path / 'nested' / 'runs.db'}")
    init_db(session_factory)
    return RunArchive(session_factory)


def _sample(index, verdict="contained"):
    return ArchivedSample(index, 1, "random", "uniform", "1/4", verdict)


def test_record_and_history(archive, tmp_path):
    assert (tmp_path / "nested").is_dir()
    first = archive.record("compute", "abc", "{}", 0, summary="ok", radius="1/2")
    second = archive.record(
        "verify",
        "abc",
        "{}",
        5,
        radius="1/2",
        seed=3,
        samples=[_sample(0), _sample(1, "violated"), _sample(2)],
    )
    archive.record("compute", "other", "{}", 0)

    runs = archive.history("abc")
    assert [run.run_id for run in runs] == [second, first]
    assert runs[0].samples_total == 3
    assert runs[0].samples_violated == 1
    assert runs[0].seed == 3
    assert runs[1].samples_total == 0
    assert runs[1].summary == "ok"
    assert len(archive.history("abc", limit=1)) == 1
    assert archive.history("missing") == []


def test_samples_come_back_in_order(archive):
    run_id = archive.record("verify", "abc", "{}", 0, samples=[_sample(1), _sample(0)])
    assert [s.sample_index for s in archive.samples(run_id)] == [0, 1]
    assert archive.samples(run_id)[0] == _sample(0)
