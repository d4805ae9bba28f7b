import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def ds():
    """Import with compiled kernels warmed so timed tests see steady state."""
    import dealersim as ds

    ds.run(ds.params_for_model("1", n_ticks=50, seed=1))
    ds.run(ds.params_for_model("2+3", d=0.01, M=2, n_ticks=50, seed=1),
           representation="dealer")
    return ds
