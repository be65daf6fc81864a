"""Hypothesis generators shared by the property tests."""

from fractions import Fraction

from hypothesis import strategies as st

from measuregame.measure import Bernoulli, Explicit, Fair

bits = st.text(alphabet="01", max_size=6)
nonempty_bits = st.text(alphabet="01", min_size=1, max_size=6)
unit_open = st.fractions(min_value=0, max_value=1, max_denominator=64).filter(lambda x: 0 < x < 1)
stake = st.fractions(min_value=0, max_value=1, max_denominator=64).filter(lambda x: x < 1)


@st.composite
def measures(draw, explicit_depth=3):
    kind = draw(st.sampled_from(["fair", "bernoulli", "explicit"]))
    if kind == "fair":
        return Fair()
    if kind == "bernoulli":
        return Bernoulli(draw(unit_open))
    words = [format(i, f"0{explicit_depth}b") for i in range(2 ** explicit_depth)]
    raw = draw(st.lists(st.integers(0, 6), min_size=len(words), max_size=len(words)))
    if not any(raw):
        raw[0] = 1
    total = sum(raw)
    return Explicit(explicit_depth, {w: Fraction(r, total) for w, r in zip(words, raw)})


clopen_nodes = st.lists(nonempty_bits, min_size=0, max_size=4)
