import json
import math

import pytest

from conftest import six_vertex, graph
from trekid.errors import BudgetExhaustedError
from trekid.identify import ancestral_identifiable, htc_identifiable, htc_unidentifiable
from trekid.sim import (
    INCONCLUSIVE,
    SimConfig,
    SimRecord,
    aggregate,
    cell_graph,
    find_inconclusive,
    load_cell_corpus,
    run_experiment,
    screen,
    write_outputs,
)


def test_screen():
    assert screen(six_vertex()) == INCONCLUSIVE
    assert screen(graph(3, [(1, 2), (2, 3)])) == "htci"
    assert screen(graph(2, [(1, 2)], [(1, 2)])) == "htcu"


def test_find_inconclusive_small_cell():
    cell = find_inconclusive(6, 0.1, 0.2, 10, master_seed=1, max_attempts=100000)
    r = cell.record
    assert len(cell.graphs) == 10 == r.inconclusive
    assert r.htci + r.htcu + r.inconclusive == r.generated
    assert not r.exhausted
    for G in cell.graphs:
        assert not htc_identifiable(G).identified
        assert not htc_unidentifiable(G).unidentifiable
    assert list(cell.alg1) == [ancestral_identifiable(G).identified for G in cell.graphs]
    assert cell.indices[-1] == r.generated - 1


def test_two_vertex_graphs_never_inconclusive():
    for d in ([], [(1, 2)], [(2, 1)]):
        for b in ([], [(1, 2)]):
            assert screen(graph(2, d, b)) != INCONCLUSIVE
    with pytest.raises(BudgetExhaustedError) as info:
        find_inconclusive(2, 0.3, 0.5, 1, master_seed=0)
    partial = info.value.partial
    assert partial.record.exhausted and partial.record.generated == 500
    assert partial.record.inconclusive == 0 and math.isnan(partial.record.a)


def test_same_sequence_across_workers_and_chunks():
    a = find_inconclusive(6, 0.2, 0.4, 5, master_seed=9, max_attempts=50000, chunk_size=97)
    b = find_inconclusive(6, 0.2, 0.4, 5, master_seed=9, max_attempts=50000, chunk_size=500)
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(2) as ex:
        c = find_inconclusive(6, 0.2, 0.4, 5, master_seed=9, max_attempts=50000, executor=ex, workers=2, chunk_size=64)
    assert a == b == c


def test_cell_graph_depends_on_all_coordinates():
    base = cell_graph(0, 6, 0.2, 0.4, 0)
    assert base == cell_graph(0, 6, 0.2, 0.4, 0)
    others = [cell_graph(1, 6, 0.2, 0.4, 0), cell_graph(0, 6, 0.2, 0.4, 1), cell_graph(0, 6, 0.3, 0.4, 0)]
    assert any(G != base for G in others)


def test_record_a():
    r = SimRecord(6, 0.1, 0.2, 0, 100, 50, 40, 10, 3)
    assert r.a == 0.3


def test_aggregate_formula():
    recs = [SimRecord(6, p, 0.2, 0, 10, 0, 0, 10, k) for p, k in ((0.1, 1), (0.2, 2), (0.3, 6))]
    ((n, q, b),) = aggregate(recs, (0.1, 0.2, 0.3))
    assert (n, q) == (6, 0.2) and b == (0.1 + 0.2 + 0.6) / 3


def test_aggregate_missing_cell_is_nan():
    recs = [SimRecord(6, 0.1, 0.2, 0, 10, 0, 0, 10, 1)]
    assert math.isnan(aggregate(recs, (0.1, 0.2))[0][2])


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        SimConfig((6,), (0.1,), (0.2,), 0)
    with pytest.raises(ValueError):
        SimConfig((), (0.1,), (0.2,), 1)
    with pytest.raises(ValueError):
        SimConfig((6,), (1.1,), (0.2,), 1)
    with pytest.raises(ValueError):
        SimConfig.from_dict({"n_values": [6], "p_values": [0.1], "q_values": [0.2], "target_count": 1, "bogus": 1})
    cfg = SimConfig((6,), (0.1,), (0.2,), 3)
    assert cfg.budget == 1500
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert SimConfig.from_json(path) == cfg


def test_run_experiment_outputs_and_corpus(tmp_path):
    cfg = SimConfig((6,), (0.1, 0.3), (0.3, 0.5), 4, master_seed=3, max_attempts=40000,
                    persist_dir=str(tmp_path / "corpus"))
    result = run_experiment(cfg)
    assert len(result.records) == 4 and not result.failures
    for r in result.records:
        assert r.htci + r.htcu + r.inconclusive == r.generated and 0 <= r.a <= 1
        cell_dir = tmp_path / "corpus" / f"n6_p{r.p:g}_q{r.q:g}"
        corpus = load_cell_corpus(cell_dir)
        assert len(corpus) == r.inconclusive
        assert all(screen(G) == INCONCLUSIVE for G in corpus)
        # a recomputed from the persisted graphs agrees exactly
        assert sum(ancestral_identifiable(G).identified for G in corpus) / len(corpus) == r.a
    for n, q, b in result.aggregate:
        assert b == sum(r.a for r in result.records if r.q == q) / 2
    paths = write_outputs(result, tmp_path / "out")
    lines = paths["cells"].read_text().splitlines()
    assert lines[0] == "n,p,q,seed,generated,htci,htcu,inconclusive,alg1_yes,a"
    assert len(lines) == 5
    assert paths["aggregate"].read_text().splitlines()[0] == "n,q,b"
    dat = paths["gnuplot"].read_text()
    assert dat.startswith("# n=6") and len([l for l in dat.splitlines() if l and not l.startswith("#")]) == 2


def test_run_experiment_reports_exhausted_cell():
    cfg = SimConfig((2, 6), (0.2,), (0.4,), 2, master_seed=0, max_attempts=3000)
    result = run_experiment(cfg)
    assert len(result.records) == 2 and len(result.failures) == 1
    assert result.records[0].exhausted and not result.records[1].exhausted
