import numpy as np
import pytest

from isingcircuits.circuit import (
    AND, TYPE2_FEASIBLE_33, TYPE2_FEASIBLE_42, XOR, XOR_AND, XOR_XOR, BudgetExceeded, Circuit, glue,
)
from isingcircuits.classify import (
    AND_ORBIT, XOR_ORBIT, ClassificationReport, characterization, check_2m_theorem, circuit_type,
    classify_indices, classify_shape, spin_action_orbit,
)
from isingcircuits.synth import is_feasible


def test_types_of_named_circuits():
    assert circuit_type(glue(AND, AND)) == 0
    assert circuit_type(XOR_AND) == 1
    assert circuit_type(XOR_XOR) == 2
    assert circuit_type(TYPE2_FEASIBLE_33) == 2
    assert circuit_type(TYPE2_FEASIBLE_42) == 2


def test_shape_21_counts():
    rep = classify_shape(2, 1)
    assert rep.total == 16
    assert rep.counts == {0: 14, 1: 0, 2: 2}
    assert rep.total_feasible == 14 and rep.feasible[2] == 0
    assert not rep.violations


@pytest.mark.parametrize("m", [1, 2, 3])
def test_single_input_all_feasible(m):
    rep = classify_shape(1, m)
    assert rep.total == 2 ** (2 * m) and rep.total_feasible == rep.total
    assert rep.counts[0] == rep.total


def test_orbits():
    assert len(AND_ORBIT) == 8 and len(XOR_ORBIT) == 2
    assert AND_ORBIT.isdisjoint(XOR_ORBIT)
    assert spin_action_orbit(XOR) == set(XOR_ORBIT)
    with pytest.raises(ValueError):
        spin_action_orbit(XOR_AND)


def test_characterization_named():
    assert characterization(XOR_AND) and is_feasible(XOR_AND)
    assert not characterization(XOR_XOR) and not is_feasible(XOR_XOR)


@pytest.mark.parametrize("m", [1, 2])
def test_2m_theorem(m):
    chk = check_2m_theorem(m)
    assert chk.checked == 2 ** (4 * m)
    assert chk.holds, chk.mismatches[:5]
    with pytest.raises(ValueError):
        check_2m_theorem(4)


def test_jobs_and_cache_invariant(tmp_path):
    a = classify_indices(2, 2, jobs=1, chunk=50)
    b = classify_indices(2, 2, jobs=2, chunk=50, cache_dir=tmp_path)
    assert np.array_equal(a, b)
    files = sorted(tmp_path.glob("*.npy"))
    assert len(files) == 6 and not list(tmp_path.glob("*.tmp.npy"))
    # poison one cached chunk: a second run must read it back rather than recompute
    first = np.load(files[0])
    np.save(files[0], np.full_like(first, 7))
    c = classify_indices(2, 2, chunk=50, cache_dir=tmp_path)
    assert np.all(c[: len(first)] == 7) or np.all(c[-len(first):] == 7)


def test_classify_row_matches_direct():
    data = classify_indices(2, 2)
    for idx in (0, 5, 99, 255):
        c = Circuit.from_index(2, 2, idx)
        assert tuple(data[idx]) == (circuit_type(c), is_feasible(c))


def test_cap():
    with pytest.raises(BudgetExceeded):
        classify_shape(3, 2, cap=1000)


def test_report_text_and_csv():
    rep = ClassificationReport((3, 2), {0: 10816, 1: 31616, 2: 23104}, {0: 10816, 1: 7808, 2: 0})
    assert rep.total == 65536
    lines = rep.to_csv().splitlines()
    assert lines[0] == "shape,type,count,feasible_count"
    assert lines[2] == "3x2,1,31616,7808"
    assert "65536 circuits, 18624 feasible" in rep.to_text()
