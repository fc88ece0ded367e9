import statistics

from hypothesis import given, strategies as st

from eprb.streams import Role, RngStreams, Stream, derive_key


@given(
    seed=st.integers(0, 2**64 - 1),
    trial=st.integers(0, 2**40),
    wing=st.integers(0, 2),
    role=st.sampled_from(list(Role)),
)
def test_same_identity_same_stream(seed, trial, wing, role):
    a, b = Stream(seed, trial, wing, role), Stream(seed, trial, wing, role)
    assert [a.random() for _ in range(4)] == [b.random() for _ in range(4)]


def test_distinct_identities_give_distinct_keys():
    keys = {derive_key(1, t, w, r) for t in range(200) for w in range(3) for r in Role}
    assert len(keys) == 200 * 3 * len(Role)


def test_draw_order_independent_of_creation_order():
    streams = RngStreams(99)
    forward = [streams.setting(i, 1).random() for i in range(50)]
    backward = [streams.setting(i, 1).random() for i in reversed(range(50))]
    assert forward == backward[::-1]


def test_uniforms_in_unit_interval_with_sane_moments():
    xs = [Stream(3, i, 1, Role.RESPONSE).random() for i in range(20000)]
    assert all(0.0 <= x < 1.0 for x in xs)
    assert abs(statistics.fmean(xs) - 0.5) < 4 * (1 / 12 / 20000) ** 0.5
    assert abs(statistics.pvariance(xs) - 1 / 12) < 0.003


def test_neighbouring_streams_uncorrelated():
    n = 20000
    a = [Stream(5, i, 1, Role.SETTING).random() for i in range(n)]
    b = [Stream(5, i, 2, Role.SETTING).random() for i in range(n)]
    c = [Stream(5, i, 0, Role.SOURCE).random() for i in range(n)]
    # sample correlation of independent uniforms has sd ~ 1/sqrt(n)
    assert abs(statistics.correlation(a, b)) < 4 / n**0.5
    assert abs(statistics.correlation(a, c)) < 4 / n**0.5


def test_draw_counter_advances():
    s = Stream(1, 0, 1, Role.RESPONSE)
    s.random()
    s.random()
    assert s.draws == 2
