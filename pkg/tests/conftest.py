from fractions import Fraction

from hypothesis import settings, strategies as st

from cotrop.newton import affine_dimension

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@st.composite
def planar_lifts(draw, max_points=10, box=4, min_dim=2):
    """Lifted point sets in the plane with affine dimension at least ``min_dim``."""
    pts = draw(st.lists(
        st.tuples(st.integers(0, box), st.integers(0, box)),
        min_size=3, max_size=max_points, unique=True,
    ).filter(lambda p: affine_dimension(p) >= min_dim))
    heights = draw(st.lists(
        st.fractions(min_value=-5, max_value=5, max_denominator=4),
        min_size=len(pts), max_size=len(pts),
    ))
    return dict(zip(pts, heights))


def frac_point(*xs):
    return tuple(Fraction(x) for x in xs)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
