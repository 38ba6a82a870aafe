import pytest

from discflux import example_1, example_2, reference_run


@pytest.fixture(scope="session")
def ex1_reference():
    """Fine-grid first-order reference for example 1 at both output times."""
    spec = example_1()
    return reference_run(spec, times=spec.output_times)


@pytest.fixture(scope="session")
def ex2_reference():
    """Fine-grid first-order reference for example 2 at both output times."""
    spec = example_2()
    return reference_run(spec, times=spec.output_times)
