from pathlib import Path

import pytest

from chorcheck import parse_choreography, parse_collaboration, parse_process

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


def fixture_path(name: str) -> Path:
    return FIXTURES / name


@pytest.fixture(scope="session")
def booking_choreography():
    return parse_choreography(fixture_text("booking_choreography.txt"))


@pytest.fixture(scope="session")
def booking_collaboration():
    return parse_collaboration(fixture_text("booking_collaboration.txt"))


@pytest.fixture(scope="session")
def booking_processes():
    """The six role implementations of the booking scenario, keyed by letter."""
    return {
        "a": parse_process(fixture_text("bank.txt")),
        "b": parse_process(fixture_text("customer_basic.txt")),
        "c": parse_process(fixture_text("customer_ack.txt")),
        "d": parse_process(fixture_text("booking_system_race.txt")),
        "e": parse_process(fixture_text("booking_system_ack.txt")),
        "f": parse_process(fixture_text("booking_system_xor.txt")),
    }
