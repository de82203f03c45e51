from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from octak.field import QQ, QQ_I, FieldDescriptor

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

RQ2 = FieldDescriptor.real_quadratic(2)
RQ2_MINUS = FieldDescriptor.real_quadratic(2, -1)
RQ5 = FieldDescriptor.real_quadratic(5)
FIELDS = [QQ, QQ_I, RQ2, RQ2_MINUS, RQ5]

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=12)
small_rationals = st.fractions(min_value=-1, max_value=1, max_denominator=8)


@st.composite
def elements(draw, F=None, q=rationals):
    F = F if F is not None else draw(st.sampled_from(FIELDS))
    a = draw(q)
    b = draw(q) if F != QQ else Fraction(0)
    return F(a, b)


@st.composite
def element_pairs(draw):
    F = draw(st.sampled_from(FIELDS))
    return draw(elements(F)), draw(elements(F))


# one line per acceptance criterion, collected by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
