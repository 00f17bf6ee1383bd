import numpy as np
import pytest

from vanetgame import (bell_number, canonical_structure, check_structure,
                       enumerate_partitions, format_structure, make_config,
                       normalize_structure, parse_structure, validate_config)


def count_partitions_recursive(n):
    # independent oracle: place element n into an existing block or a new one
    def rec(elements):
        if not elements:
            return [[]]
        head, *rest = elements
        out = []
        for smaller in rec(rest):
            for idx in range(len(smaller)):
                out.append(smaller[:idx] + [smaller[idx] + [head]] + smaller[idx + 1:])
            out.append([[head]] + smaller)
        return out
    return len(rec(list(range(1, n + 1))))


def test_partition_counts_match_recursive_oracle():
    for n in range(1, 8):
        assert len(enumerate_partitions(n)) == count_partitions_recursive(n)


def test_partition_counts_match_bell_numbers():
    known = {1: 1, 2: 2, 3: 5, 4: 15, 5: 52, 6: 203, 7: 877, 8: 4140,
             9: 21147, 10: 115975}
    for n, b in known.items():
        assert bell_number(n) == b
        assert len(enumerate_partitions(n)) == b


def test_partitions_are_disjoint_and_exhaustive():
    for n in range(1, 7):
        seen = set()
        for cs in enumerate_partitions(n):
            assert not check_structure(cs, n)
            key = frozenset(cs)
            assert key not in seen
            seen.add(key)


def test_partition_order_is_deterministic_and_canonical():
    parts = enumerate_partitions(4)
    assert parts == enumerate_partitions(4)
    assert parts[0] == (frozenset({1, 2, 3, 4}),)
    assert parts[-1] == tuple(frozenset({m}) for m in (1, 2, 3, 4))
    # blocks come out ordered by smallest member
    for cs in parts:
        assert list(cs) == sorted(cs, key=min)


def test_single_player_partition():
    assert enumerate_partitions(1) == [(frozenset({1}),)]


def test_zero_players_rejected():
    with pytest.raises(ValueError):
        enumerate_partitions(0)


def test_normalize_splits_rsu_only_blocks():
    cs = canonical_structure([{1, 2}, {3, 4}])
    assert normalize_structure(cs, 2) == canonical_structure([{1, 2}, {3}, {4}])


def test_normalize_is_identity_on_singletons_and_mixed_blocks():
    singletons = canonical_structure([{1}, {2}, {3}, {4}])
    assert normalize_structure(singletons, 2) == singletons
    mixed = canonical_structure([{1, 3, 4}, {2}])
    assert normalize_structure(mixed, 2) == mixed


def test_normalize_is_idempotent():
    for cs in enumerate_partitions(5):
        once = normalize_structure(cs, 2)
        assert normalize_structure(once, 2) == once


def test_validate_accepts_good_config(default_cfg):
    assert validate_config(default_cfg) == []


def test_validate_reports_probability_out_of_range():
    cfg = make_config(2, 1, p=[0.5, 1.2], enc=0.4, delta=0.5, price=1.0,
                      cost_fwd=0.1, cost_rcv=0.1, check=False)
    errors = validate_config(cfg)
    assert any("probability out of range" in e for e in errors)


def test_validate_reports_shape_mismatch():
    cfg = make_config(2, 2, p=0.5, enc=0.4, delta=np.zeros((2, 1)), price=1.0,
                      cost_fwd=0.1, cost_rcv=0.1, check=False)
    errors = validate_config(cfg)
    assert any("delta: shape mismatch" in e for e in errors)


def test_validate_reports_all_violations_at_once():
    cfg = make_config(2, 1, p=[0.5, -0.1], enc=2.0, delta=-1.0, price=1.0,
                      cost_fwd=0.1, cost_rcv=np.zeros((9, 9)), check=False)
    errors = validate_config(cfg)
    assert len(errors) >= 3


def test_make_config_raises_on_invalid():
    with pytest.raises(ValueError, match="probability out of range"):
        make_config(1, 1, p=1.5, enc=0.5, delta=0.5, price=1.0,
                    cost_fwd=0.1, cost_rcv=0.1)


def test_config_arrays_are_read_only(default_cfg):
    with pytest.raises(ValueError):
        default_cfg.p[0] = 0.9


def test_structure_parsing_round_trip():
    cs = parse_structure("2,1|3|4", 4)
    assert cs == canonical_structure([{1, 2}, {3}, {4}])
    assert format_structure(cs) == "1,2|3|4"
    assert parse_structure(format_structure(cs), 4) == cs


def test_structure_parsing_rejects_bad_specs():
    with pytest.raises(ValueError, match="missing"):
        parse_structure("1,2|3", 4)
    with pytest.raises(ValueError, match="more than one"):
        parse_structure("1,2|2,3,4", 4)
    with pytest.raises(ValueError, match="out of range"):
        parse_structure("1,2|3,4,5", 4)
    with pytest.raises(ValueError, match="non-integer"):
        parse_structure("1,x|3,4", 4)
