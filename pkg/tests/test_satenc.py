import itertools
import random
import stat
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import rand_cnf, rand_model, rand_sat_query
from oracles import sat_truth_table
from polcheck import obsexpr as ox
from polcheck.engines import mc_sfe, recheck_witness
from polcheck.errors import FragmentMismatch, KTooLarge
from polcheck.logic import BOT, parse_formula, parse_obs
from polcheck.reductions import from_3sat
from polcheck.satenc import (CnfInstance, Letter, check_via_sat, decode_plan, emit_dimacs, encode,
                             solve, solve_external, split_query)


def cnf(clauses, n=None):
    n = n if n is not None else max([abs(l) for c in clauses for l in c] + [1])
    return CnfInstance(n, tuple(tuple(c) for c in clauses), {})


def test_solver_trivial_cases():
    assert solve(cnf([], 1)).sat
    assert not solve(cnf([(1,), (-1,)])).sat
    assert not solve(cnf([()], 1)).sat


def test_pigeonhole_3_into_2_is_unsat():
    var = {(p, h): 2 * p + h + 1 for p in range(3) for h in range(2)}
    clauses = [(var[p, 0], var[p, 1]) for p in range(3)]
    clauses += [(-var[p, h], -var[q, h]) for h in range(2) for p in range(3) for q in range(p + 1, 3)]
    assert all(not all(any((bits[abs(l) - 1]) == (l > 0) for l in c) for c in clauses)
               for bits in itertools.product([False, True], repeat=6))
    assert not solve(cnf(clauses, 6)).sat


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 100_000))
def test_solver_matches_truth_table(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 8)
    clauses = rand_cnf(rng, n, rng.randint(1, 30))
    res = solve(cnf(clauses, n))
    assert res.sat == (sat_truth_table(clauses, n) is not None)
    if res.sat:
        assert all(any(res.assignment[abs(l)] == (l > 0) for l in c) for c in clauses)


def test_dimacs_format():
    assert emit_dimacs(cnf([(1, -2)], 2)) == "p cnf 2 1\n1 -2 0\n"


def test_message_query_plan(message):
    pi, phi = split_query(parse_formula("<m>(K_R d & ~K_A d)"))
    c = encode(message, "s", pi, phi, 1)
    res = solve(c)
    assert res.sat and decode_plan(res.assignment, c.varmap) == ("m",)
    v = check_via_sat(message, "s", parse_formula("<m>(K_R d & ~K_A d)"))
    assert v.truth and v.witness == ("m",) and v.stats["k"] == 1


def test_bottom_is_unsat_at_every_length(traffic):
    pi = parse_obs("g + a")
    for k in range(2):
        assert not solve(encode(traffic, "s", pi, BOT, k)).sat


def test_encode_rejections(traffic):
    with pytest.raises(KTooLarge):
        encode(traffic, "s", parse_obs("g + a"), BOT, 2)
    with pytest.raises(FragmentMismatch):
        check_via_sat(traffic, "s", parse_formula("<g*> f"))
    with pytest.raises(FragmentMismatch):
        check_via_sat(traffic, "s", parse_formula("<g> [a] f"))


def test_encoding_is_well_formed(message):
    pi, phi = split_query(parse_formula("<m + m'.m> Kh_A ~d"))
    for k in range(3):
        c = encode(message, "s", pi, phi, k)
        assert len(set(c.varmap.values())) == len(c.varmap) == c.var_count
        assert all(0 < abs(l) <= c.var_count for cl in c.clauses for l in cl)


def test_fused_3sat_instance():
    clauses = [(1, 2, -3), (-1, 3), (2, 3)]
    m, s, f = from_3sat(clauses)
    v = check_via_sat(m, s, f)
    assert v.truth and len(v.witness) == 3
    pi, phi = split_query(f)
    assert solve(encode(m, s, pi, phi, 3)).sat


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 100_000))
def test_agrees_with_sfe_and_rechecks(seed):
    rng = random.Random(seed)
    m = rand_model(rng)
    s = rng.choice(m.worlds)
    f = rand_sat_query(rng, m, 2)
    v = check_via_sat(m, s, f)
    assert v.truth == mc_sfe(m, s, f).truth
    if v.truth:
        assert recheck_witness(m, s, f, v.witness, fused=True)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 100_000))
def test_exactly_one_letter_per_position(seed):
    rng = random.Random(seed)
    m = rand_model(rng)
    s = rng.choice(m.worlds)
    pi, phi = split_query(rand_sat_query(rng, m, 1))
    for k in range(int(ox.max_word_length(pi)) + 1):
        c = encode(m, s, pi, phi, k)
        res = solve(c)
        if res.sat:
            for t in range(1, k + 1):
                assert sum(res.assignment[c.varmap[Letter(t, a)]] for a in m.alphabet) == 1


def test_external_solver_contract(tmp_path, message):
    script = tmp_path / "fake_solver.py"
    script.write_text(
        "import sys\n"
        "from polcheck.reductions import read_dimacs\n"
        "from polcheck.satenc import CnfInstance, solve\n"
        "n, cls = read_dimacs(open(sys.argv[1]).read())\n"
        "r = solve(CnfInstance(n, tuple(cls), {}))\n"
        "print('SAT' if r.sat else 'UNSAT')\n"
        "if r.sat: print('v ' + ' '.join(str(v if b else -v) for v, b in r.assignment.items()) + ' 0')\n")
    wrapper = tmp_path / "solver"
    wrapper.write_text(f"#!/bin/sh\nexec {sys.executable} {script} \"$@\"\n")
    wrapper.chmod(wrapper.stat().st_mode | stat.S_IEXEC)
    v = check_via_sat(message, "s", parse_formula("<m>(K_R d & ~K_A d)"), solver_path=str(wrapper))
    assert v.truth and v.witness == ("m",)
    assert not solve_external(cnf([(1,), (-1,)]), str(wrapper)).sat
