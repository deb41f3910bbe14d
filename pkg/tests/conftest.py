import hypothesis
import hypothesis.strategies as st
import numpy as np

from bjlab import BochnerElement, SpaceSpec

hypothesis.settings.register_profile(
    "bjlab", deadline=None, derandomize=True, max_examples=60)
hypothesis.settings.load_profile("bjlab")

# exponent grids used across the property suites
SMOOTH_PS = (1.5, 2.0, 3.0, 4.0)
SMOOTH_QS = (1.5, 2.0, 3.0)

entries = st.floats(min_value=-50.0, max_value=50.0,
                    allow_nan=False, allow_infinity=False)
scalars = st.floats(min_value=-8.0, max_value=8.0,
                    allow_nan=False, allow_infinity=False)


def block_lists(n: int, d: int):
    return st.lists(st.lists(entries, min_size=d, max_size=d),
                    min_size=n, max_size=n)


@st.composite
def specs(draw, ps=(1.0,) + SMOOTH_PS, qs=SMOOTH_QS, max_n=4, max_d=3):
    p = draw(st.sampled_from(ps))
    q = draw(st.sampled_from(qs))
    n = draw(st.integers(1, max_n))
    d = draw(st.integers(1, max_d))
    weights = tuple(draw(st.lists(
        st.floats(min_value=0.1, max_value=5.0), min_size=n, max_size=n)))
    return SpaceSpec(p=p, q=q, n=n, d=d, weights=weights)


@st.composite
def elements(draw, spec: SpaceSpec, nonzero: bool = False):
    rows = draw(block_lists(spec.n, spec.d))
    if nonzero:
        i = draw(st.integers(0, spec.n - 1))
        j = draw(st.integers(0, spec.d - 1))
        rows[i][j] = draw(st.sampled_from((-1.0, 1.0))) * draw(
            st.floats(min_value=0.5, max_value=10.0))
    return BochnerElement.from_lists(rows)


@st.composite
def spec_with_elements(draw, count: int = 2, nonzero_first: bool = True, **kw):
    spec = draw(specs(**kw))
    els = [draw(elements(spec, nonzero=(nonzero_first and k == 0)))
           for k in range(count)]
    return (spec, *els)


def rng_for(test_name: str, salt: int = 0) -> np.random.Generator:
    """Stable per-test generator so randomized suites are reproducible."""
    digest = sum(ord(c) * (31**k % 997) for k, c in enumerate(test_name))
    return np.random.default_rng([digest % (2**31), salt])
