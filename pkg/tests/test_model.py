import random

from collections import Counter

from chorcheck import (
    Collaboration,
    Comm,
    in_edges,
    labels_choreo,
    labels_collab,
    out_edges,
    parse_choreography,
    parse_collaboration,
)
from conftest import fixture_text
from generators import matched_process_tuple
from chorcheck.composition import compose


def test_labels_of_booking_choreography(booking_choreography):
    expected = {
        Comm("c", "bs", "login"),
        Comm("c", "bs", "request"),
        Comm("bs", "c", "reply"),
        Comm("c", "bs", "abort"),
        Comm("c", "bs", "book"),
        Comm("c", "bk", "pay"),
        Comm("bk", "bs", "confirmation"),
        Comm("bs", "c", "ticket"),
    }
    assert labels_choreo(booking_choreography) == expected


def test_labels_of_trivial_choreography():
    ch = parse_choreography("start(e1) | end(e1, e2)")
    assert labels_choreo(ch) == frozenset()


def test_labels_of_race_choreography():
    ch = parse_choreography(fixture_text("race_choreography.txt"))
    assert labels_choreo(ch) == {
        Comm("A", "B", "m1"),
        Comm("A", "C", "m2"),
        Comm("B", "A", "m3"),
        Comm("C", "A", "m4"),
    }


def test_labels_collab_matches_choreography(booking_choreography, booking_collaboration):
    assert labels_collab(booking_collaboration) == labels_choreo(booking_choreography)


def test_labels_collab_receive_side_only():
    collab = parse_collaboration(
        "pool A { start(a1) | taskSnd(a1, a2, A->B:m) | end(a2, a3) }"
        "pool B { start(b1) | task(b1, b2) | end(b2, b3) }"
    )
    assert labels_collab(collab) == frozenset()


def test_labels_of_guarded_request_response():
    collab = parse_collaboration(
        fixture_text("request_response_guarded.txt")
    )
    assert labels_collab(collab) == {
        Comm("A", "B", "m1"),
        Comm("B", "A", "m2"),
        Comm("B", "A", "m"),
    }


def test_out_and_in_edges_of_booking(booking_collaboration):
    outs = out_edges(booking_collaboration)
    ins = in_edges(booking_collaboration)
    assert outs == ins
    assert len(outs) == 8
    assert all(n == 1 for n in outs.values())


def test_out_edges_empty_without_senders():
    collab = parse_collaboration(
        "pool A { start(a1) | taskRcv(a1, a2, B->A:m) | end(a2, a3) }"
    )
    assert out_edges(collab) == Counter()
    assert len(in_edges(collab)) == 1


def test_out_edges_multiset_counts_repeats():
    collab = parse_collaboration(
        "pool A { start(a1) | taskSnd(a1, a2, A->B:m) | taskSnd(a2, a4, A->B:m) | end(a4, a5) }"
    )
    (edge, count), = out_edges(collab).items()
    assert (edge.sender, edge.receiver, edge.message, count) == ("A", "B", "m", 2)


def test_in_edges_collects_gateway_branches(booking_collaboration):
    ins = in_edges(booking_collaboration)
    assert any(e.message == "abort" for e in ins)
    assert any(e.message == "book" for e in ins)


def test_edge_multisets_are_pool_unions():
    rng = random.Random(7)
    for _ in range(50):
        processes, names = matched_process_tuple(rng)
        collab = compose(processes, names)
        for cut in range(1, len(collab.pools)):
            left = Collaboration(collab.pools[:cut])
            right = Collaboration(collab.pools[cut:])
            assert out_edges(collab) == out_edges(left) + out_edges(right)
            assert in_edges(collab) == in_edges(left) + in_edges(right)


def test_labels_contain_no_self_communication():
    rng = random.Random(11)
    for _ in range(50):
        processes, names = matched_process_tuple(rng)
        collab = compose(processes, names)
        assert all(l.sender != l.receiver for l in labels_collab(collab))
