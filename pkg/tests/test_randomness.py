import pytest
from hypothesis import given, strategies as st

from randsteward.randomness import (
    BudgetReport,
    CounterSource,
    SystemSource,
    TapeExhausted,
    TapeSource,
    bits_to_hex,
    bits_to_int,
    draw_bits,
    draw_uniform_power_of_two,
    hex_to_bits,
    int_to_bits,
)

bitstrings = st.text(alphabet="01", min_size=0, max_size=64)


def test_tape_replays_exactly():
    tape = TapeSource("1011001")
    assert tape.draw(3) == "101"
    assert tape.draw(2) == "10"
    assert tape.remaining == 2


def test_tape_exhaustion_names_the_phase():
    tape = TapeSource("101")
    assert tape.draw(2, phase="warmup") == "10"
    with pytest.raises(TapeExhausted) as info:
        tape.draw(5, phase="seed")
    assert info.value.phase == "seed"
    assert info.value.requested == 5
    assert info.value.available == 1


def test_tape_rejects_non_bits():
    with pytest.raises(ValueError):
        TapeSource("10a1")


def test_budget_report_counts_per_phase():
    tape = TapeSource("0" * 32)
    tape.draw(5, phase="seed")
    tape.draw(7, phase="seed")
    tape.draw(3, phase="shift")
    report = tape.report
    assert report.bits_drawn == 15
    assert report.per_phase == {"seed": 12, "shift": 3}
    assert report.to_json() == {"bits_drawn": 15, "per_phase": {"seed": 12, "shift": 3}}


def test_draw_bits_free_function():
    tape = TapeSource("110")
    assert draw_bits(tape, 2, "x") == "11"
    assert tape.report.per_phase == {"x": 2}


def test_negative_draw_rejected():
    with pytest.raises(ValueError):
        TapeSource("0").draw(-1)


def test_bits_to_int_is_little_endian():
    assert bits_to_int("101") == 5
    assert bits_to_int("10") == 1
    assert bits_to_int("011") == 6
    assert bits_to_int("") == 0


@given(value=st.integers(min_value=0, max_value=2**48 - 1))
def test_int_bits_round_trip(value):
    assert bits_to_int(int_to_bits(value, 48)) == value


def test_int_to_bits_overflow():
    with pytest.raises(ValueError):
        int_to_bits(8, 3)
    with pytest.raises(ValueError):
        int_to_bits(-1, 3)


def test_uniform_power_of_two_decodes_plus_one():
    # little-endian decode of the drawn bits, then +1
    assert draw_uniform_power_of_two(TapeSource("011"), 8) == 7
    assert draw_uniform_power_of_two(TapeSource("000"), 8) == 1
    assert draw_uniform_power_of_two(TapeSource("111"), 8) == 8
    assert draw_uniform_power_of_two(TapeSource(""), 1) == 1


def test_uniform_power_of_two_is_uniform_and_exact_cost():
    u = 16
    seen = []
    for val in range(u):
        tape = TapeSource(int_to_bits(val, 4))
        seen.append(draw_uniform_power_of_two(tape, u))
        assert tape.report.bits_drawn == 4
    assert sorted(seen) == list(range(1, u + 1))


def test_uniform_power_of_two_rejects_non_powers():
    with pytest.raises(ValueError):
        draw_uniform_power_of_two(TapeSource("0000"), 6)


def test_counter_source_is_reproducible():
    a = CounterSource(b"master", 3)
    b = CounterSource(b"master", 3)
    assert a.draw(500) == b.draw(500)
    c = CounterSource(b"master", 4)
    assert a.draw(500) != c.draw(500)  # astronomically unlikely to collide


def test_system_source_draws_count():
    src = SystemSource()
    bits = src.draw(37)
    assert len(bits) == 37
    assert not bits.strip("01")
    assert src.report.bits_drawn == 37


def test_hex_decoding_is_per_byte_lsb_first():
    assert hex_to_bits("01", 8) == "10000000"
    assert hex_to_bits("80", 8) == "00000001"
    assert hex_to_bits("ff00", 12) == "111111110000"


def test_hex_requires_enough_bits():
    with pytest.raises(ValueError):
        hex_to_bits("ab", 9)


@given(bits=bitstrings)
def test_hex_round_trip(bits):
    assert hex_to_bits(bits_to_hex(bits), len(bits)) == bits
