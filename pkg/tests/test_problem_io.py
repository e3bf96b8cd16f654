"""Problem/solution file format: round-trips and strict parsing."""

import numpy as np
import pytest

from permsync import (FileFormatError, ModelConfig, Permutation, ProblemInstance,
                      SeededRng, generate_instance, read_problem, read_solution,
                      write_problem, write_solution)


def lac_instance(seed=7):
    cfg = ModelConfig("lac", n=12, m=4, p=1.0, n_c=2, m_c=4)
    return generate_instance(cfg, SeededRng(seed))


def test_round_trip_is_identity(tmp_path):
    inst = lac_instance()
    path = tmp_path / "a.psync"
    write_problem(path, inst)
    back = read_problem(path)
    assert back == inst


def test_reserialisation_is_byte_identical(tmp_path):
    inst = lac_instance()
    p1, p2 = tmp_path / "a.psync", tmp_path / "b.psync"
    write_problem(p1, inst)
    write_problem(p2, read_problem(p1))
    assert p1.read_bytes() == p2.read_bytes()


def test_file_is_ascii_lf_single_spaces(tmp_path):
    inst = lac_instance()
    path = tmp_path / "a.psync"
    write_problem(path, inst)
    raw = path.read_bytes()
    assert b"\r" not in raw and b"  " not in raw
    text = raw.decode("ascii")
    assert text.startswith("PSYNC 1\n12 4\nTRUTH\n")


def test_truth_free_round_trip(tmp_path):
    inst = lac_instance()
    stripped = ProblemInstance(inst.graph, inst.meas, None, None)
    path = tmp_path / "a.psync"
    write_problem(path, stripped)
    back = read_problem(path)
    assert back.truth is None and back.bad_edges is None
    assert back.meas == inst.meas


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def test_non_bijective_map_rejected(tmp_path):
    path = tmp_path / "bad.psync"
    write_lines(path, ["PSYNC 1", "2 3", "EDGES", "0 1", "0 0 1"])
    with pytest.raises(FileFormatError, match="bijection"):
        read_problem(path)


def test_unknown_version_rejected(tmp_path):
    path = tmp_path / "bad.psync"
    write_lines(path, ["PSYNC 2", "2 2", "EDGES", "0 1", "0 1"])
    with pytest.raises(FileFormatError, match="version"):
        read_problem(path)


def test_malformed_header_rejected(tmp_path):
    path = tmp_path / "bad.psync"
    write_lines(path, ["PSYNX 1", "2 2", "EDGES", "0 1", "0 1"])
    with pytest.raises(FileFormatError, match="header"):
        read_problem(path)


def test_duplicate_edge_rejected(tmp_path):
    path = tmp_path / "bad.psync"
    write_lines(path, ["PSYNC 1", "3 2", "EDGES",
                       "0 1", "0 1", "1 0", "1 0"])
    with pytest.raises(FileFormatError, match="duplicate"):
        read_problem(path)


def test_inconsistent_flags_rejected(tmp_path):
    path = tmp_path / "bad.psync"
    write_lines(path, ["PSYNC 1", "3 2", "EDGES",
                       "0 1 0", "0 1", "1 2", "0 1"])
    with pytest.raises(FileFormatError, match="flags"):
        read_problem(path)


def test_truth_with_wrong_good_edge_rejected(tmp_path):
    path = tmp_path / "bad.psync"
    # claims edge is good but the block disagrees with the truth
    write_lines(path, ["PSYNC 1", "2 2", "TRUTH", "0 1", "0 1",
                       "EDGES", "0 1 0", "1 0"])
    with pytest.raises(FileFormatError, match="inconsistent"):
        read_problem(path)


def test_reversed_edge_orientation_normalised(tmp_path):
    path = tmp_path / "ok.psync"
    write_lines(path, ["PSYNC 1", "2 3", "EDGES", "1 0", "2 0 1"])
    inst = read_problem(path)
    assert inst.meas.block(1, 0) == Permutation(np.array([2, 0, 1]))
    assert inst.meas.block(0, 1) == Permutation(np.array([1, 2, 0]))


def test_solution_round_trip(tmp_path):
    gen = SeededRng(3).generator
    perms = tuple(Permutation(gen.permutation(5)) for _ in range(4))
    path = tmp_path / "sol.psync"
    write_solution(path, perms)
    assert read_solution(path) == perms
