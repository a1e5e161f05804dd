"""Acceptance gate: every shipped behaviour, checked end to end.

Each test prints one pass/fail line so a full run reads as a checklist.
"""

import random
import time

from chorcheck import (
    Comm,
    check_bbc,
    check_tbc,
    compose,
    export_aut,
    generate_lts,
    hide,
    hiding_set,
    parse_aut,
    parse_choreography,
    parse_collaboration,
    print_model,
    saturate,
    well_composed,
)
from chorcheck.cli import main
from conftest import FIXTURES, GOLDEN, fixture_path, fixture_text
from generators import matched_process_tuple, random_lts, tau_padded
from test_conformance import (
    assert_replays,
    naive_weak_bisimilar,
    product_size,
    traces_upto,
)
from test_text_syntax import parse_any


def report(name: str, ok: bool):
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'}")
    assert ok, name


def fx(name):
    return str(fixture_path(name))


PROCESSES = {
    "a": "bank.txt",
    "b": "customer_basic.txt",
    "c": "customer_ack.txt",
    "d": "booking_system_race.txt",
    "e": "booking_system_ack.txt",
    "f": "booking_system_xor.txt",
}


def run_check(letters, *extra, capsys=None):
    files = ",".join(fx(PROCESSES[x]) for x in letters)
    argv = [
        "check", fx("booking_choreography.txt"),
        "--processes", files, "--names", "bk,c,bs", "--report", "lines", *extra,
    ]
    code = main(argv)
    out = capsys.readouterr().out if capsys else ""
    return code, out


def test_role_assignment_matrix(capsys):
    """Six candidate role assignments: who composes, and which verdicts hold."""
    t0 = time.perf_counter()
    results = {}
    for letters in ("abd", "abe", "abf", "acd", "ace", "acf"):
        code, out = run_check(letters, capsys=capsys)
        verdicts = dict(
            line.split()[:2] for line in out.splitlines() if line and " " in line
        )
        results[letters] = (code, verdicts.get("tbc"), verdicts.get("bbc"))
    elapsed = time.perf_counter() - t0
    ok = results == {
        "abd": (4, "false", "false"),
        "abe": (2, None, None),
        "abf": (2, None, None),
        "acd": (2, None, None),
        "ace": (0, "true", "true"),
        "acf": (4, "true", "false"),
    }
    report("role assignment matrix", ok)
    report(f"role assignment matrix runtime ({elapsed:.2f}s < 5s)", elapsed < 5.0)


def test_shortest_distinguishing_trace(capsys):
    """The basic composition leaks an early payment, found as a shortest trace."""
    ch = parse_choreography(fixture_text("booking_choreography.txt"))
    collab = parse_collaboration(fixture_text("booking_collaboration.txt"))
    result = check_tbc(generate_lts(ch), generate_lts(collab), hiding_set(ch, collab))
    expected = (
        Comm("c", "bs", "login"),
        Comm("c", "bs", "request"),
        Comm("bs", "c", "reply"),
        Comm("c", "bk", "pay"),
    )
    ok = (
        not result.verdict
        and result.counterexample.labels == expected
        and result.counterexample.side == "collaboration"
    )
    code, out = run_check("abd", capsys=capsys)
    ok = ok and "tbc false c->bs:login·c->bs:request·bs->c:reply·c->bk:pay collaboration" in out
    report("shortest distinguishing trace", ok)


def pair_verdicts(ch_name, col_name):
    ch = parse_choreography(fixture_text(ch_name))
    col = parse_collaboration(fixture_text(col_name))
    chl, coll = generate_lts(ch), generate_lts(col)
    hidden = hiding_set(ch, col)
    return (
        check_tbc(chl, coll, hidden).verdict,
        check_bbc(chl, coll, hidden).verdict,
        hidden,
    )


def test_send_order_study():
    """Only the in-order reader conforms; reordering, dropping or racing fail."""
    ch = "two_messages_choreography.txt"
    ok = pair_verdicts(ch, "two_messages_inorder.txt")[:2] == (True, True)
    for bad in ("two_messages_reversed.txt", "two_messages_dropped.txt",
                "two_messages_parallel.txt"):
        ok = ok and pair_verdicts(ch, bad)[:2] == (False, False)
    report("send order study", ok)


def test_event_based_race_study():
    """A race over two answers conforms even though one answer stays unread."""
    tbc, bbc, _ = pair_verdicts("race_choreography.txt", "race_collaboration.txt")
    report("event-based race study", tbc and bbc)


def test_request_response_study():
    ch = "request_response_choreography.txt"
    direct = pair_verdicts(ch, "request_response_direct.txt")
    early = pair_verdicts(ch, "request_response_early_reply.txt")
    guarded = pair_verdicts(ch, "request_response_guarded.txt")
    ok = (
        direct[:2] == (True, True)
        and early[:2] == (False, False)
        and guarded[:2] == (True, True)
        and guarded[2] == {Comm("B", "A", "m")}
    )
    report("request-response study", ok)


def test_drink_shopping_study():
    """Unaligned internal choices keep the traces but lose bisimilarity."""
    tbc, bbc, _ = pair_verdicts(
        "drink_shopping_choreography.txt", "drink_shopping_collaboration.txt"
    )
    report("drink shopping study", tbc and not bbc)


# ---------------------------------------------------------------------------
# Property suites


def test_composition_always_well_composed_suite():
    rng = random.Random(2024)
    for _ in range(1000):
        processes, names = matched_process_tuple(rng)
        assert well_composed(compose(processes, names)) == []
    report("composition always well-composed (1000 tuples)", True)


def test_bisimulation_implies_trace_conformance_suite():
    rng = random.Random(2025)
    checked = 0
    for i in range(500):
        a = random_lts(rng, max_states=5)
        b = tau_padded(rng, a) if i % 2 == 0 else random_lts(rng, max_states=5)
        if check_bbc(a, b).verdict:
            assert check_tbc(a, b).verdict
            checked += 1
    corpus = [
        ("booking_choreography.txt", "booking_collaboration.txt"),
        ("two_messages_choreography.txt", "two_messages_inorder.txt"),
        ("two_messages_choreography.txt", "two_messages_parallel.txt"),
        ("race_choreography.txt", "race_collaboration.txt"),
        ("request_response_choreography.txt", "request_response_direct.txt"),
        ("request_response_choreography.txt", "request_response_guarded.txt"),
        ("drink_shopping_choreography.txt", "drink_shopping_collaboration.txt"),
    ]
    for ch_name, col_name in corpus:
        tbc, bbc, _ = pair_verdicts(ch_name, col_name)
        assert not bbc or tbc
    report(f"bisimulation implies trace conformance (500 pairs, {checked} equivalent)",
           checked >= 100)


def test_trace_checker_vs_enumeration_suite():
    rng = random.Random(2026)
    tested = 0
    for _ in range(600):
        a = random_lts(rng, max_states=6)
        b = random_lts(rng, max_states=6)
        wa, wb = saturate(a), saturate(b)
        alphabet = sorted(wa.alphabet | wb.alphabet, key=str)
        bound = product_size(wa, wb, alphabet)
        if bound > 12:
            continue
        tested += 1
        expected = traces_upto(wa, bound, alphabet) == traces_upto(wb, bound, alphabet)
        assert check_tbc(a, b).verdict == expected
    report(f"trace checker vs enumeration oracle ({tested} systems <= 12 product states)",
           tested >= 300)


def test_bisimulation_checker_vs_naive_fixpoint_suite():
    rng = random.Random(2027)
    for i in range(300):
        a = random_lts(rng, max_states=4)
        b = tau_padded(rng, a) if i % 3 == 0 else random_lts(rng, max_states=4)
        assert check_bbc(a, b).verdict == naive_weak_bisimilar(saturate(a), saturate(b))
    report("bisimulation checker vs naive fixpoint (300 pairs <= 8 states)", True)


def test_counterexamples_replay_suite():
    rng = random.Random(2028)
    replayed = 0
    for _ in range(300):
        a = random_lts(rng, max_states=5)
        b = random_lts(rng, max_states=5)
        wa, wb = saturate(a), saturate(b)
        for result in (check_tbc(a, b), check_bbc(a, b)):
            if not result.verdict:
                assert_replays(result, wa, wb)
                replayed += 1
    pairs = [
        ("booking_choreography.txt", "booking_collaboration.txt"),
        ("race_choreography.txt", "race_collaboration_uncoordinated.txt"),
        ("drink_shopping_choreography.txt", "drink_shopping_collaboration.txt"),
        ("two_messages_choreography.txt", "two_messages_parallel.txt"),
        ("request_response_choreography.txt", "request_response_early_reply.txt"),
    ]
    for ch_name, col_name in pairs:
        ch = parse_choreography(fixture_text(ch_name))
        col = parse_collaboration(fixture_text(col_name))
        chl, coll = generate_lts(ch), generate_lts(col)
        hidden = hiding_set(ch, col)
        wa, wb = saturate(chl), saturate(hide(coll, hidden))
        for result in (check_tbc(chl, coll, hidden), check_bbc(chl, coll, hidden)):
            if not result.verdict:
                assert_replays(result, wa, wb)
                replayed += 1
    report(f"counterexamples replay ({replayed} false verdicts)", replayed >= 100)


def test_token_conservation_suite():
    from test_semantics import (
        CHOREO_FIXTURES,
        COLLAB_FIXTURES,
        test_choreography_token_conservation,
        test_collaboration_token_conservation,
    )

    for name in CHOREO_FIXTURES:
        test_choreography_token_conservation(name)
    for name in COLLAB_FIXTURES:
        test_collaboration_token_conservation(name)
    report("token conservation on every generated transition", True)


def test_format_round_trips_suite():
    count = 0
    for path in sorted(FIXTURES.glob("*.txt")):
        parse, model = parse_any(path.read_text())
        assert parse(print_model(model)) == model
        count += 1
    from chorcheck import BoundExceeded

    aut_trips = 0
    for path in sorted(FIXTURES.glob("*.txt")):
        parse, model = parse_any(path.read_text())
        if parse in (parse_collaboration, parse_choreography):
            try:
                lts = generate_lts(model)
            except BoundExceeded:
                continue  # the unbounded-loop fixture has no finite system
            assert parse_aut(export_aut(lts)) == lts
            aut_trips += 1
    report(f"text and .aut round-trips ({count} text, {aut_trips} .aut)",
           count >= 15 and aut_trips >= 12)


def test_golden_outputs_suite():
    checks = {
        "booking_choreography.aut": generate_lts(
            parse_choreography(fixture_text("booking_choreography.txt"))
        ),
        "booking_collaboration.aut": generate_lts(
            parse_collaboration(fixture_text("booking_collaboration.txt"))
        ),
        "minimal_choreography.aut": generate_lts(
            parse_choreography("start(e1) | end(e1, e2)")
        ),
    }
    ok = all(
        export_aut(lts) == (GOLDEN / name).read_bytes() for name, lts in checks.items()
    )
    report("golden .aut outputs byte-exact", ok)
