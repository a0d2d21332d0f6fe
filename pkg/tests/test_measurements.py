import pytest
from hypothesis import given, strategies as st

from dvfsmodel.core import MeasurementFormatError
from dvfsmodel.measurements import (
    COMPLETION,
    POWER,
    Measurement,
    MeasurementSet,
    format_csv,
    parse_csv,
)

SAMPLE = """metric,workload_id,cpu,freq_mhz,value
power_watts,,0,1600,35.54
power_watts,,1.0,3400,92.56
completion_seconds,randmem32,0.2,2926,150.5
"""


def test_parse_sample():
    ms = parse_csv(SAMPLE, "i7")
    assert len(ms) == 3
    assert ms.lookup(POWER, 0.0, 1600) == 35.54
    assert ms.lookup(COMPLETION, 0.2, 2926, "randmem32") == 150.5
    assert ms.lookup(POWER, 0.5, 1600) is None
    assert ms.workloads() == ["randmem32"]


def test_duplicate_rows_rejected():
    text = SAMPLE + "power_watts,,0.0,1600,36\n"
    with pytest.raises(MeasurementFormatError):
        parse_csv(text)


def test_completion_requires_cpu():
    with pytest.raises(MeasurementFormatError):
        parse_csv("metric,workload_id,cpu,freq_mhz,value\ncompletion_seconds,w,0,1600,10\n")


def test_missing_header_column():
    with pytest.raises(MeasurementFormatError):
        parse_csv("metric,cpu,freq_mhz,value\npower_watts,0,1600,10\n")


def test_bad_number():
    with pytest.raises(MeasurementFormatError, match="line 2"):
        parse_csv("metric,workload_id,cpu,freq_mhz,value\npower_watts,,zero,1600,10\n")


_record = st.one_of(
    st.builds(Measurement, st.just(POWER), st.none(),
              st.floats(0, 1), st.integers(1, 5000), st.floats(0, 1e4)),
    st.builds(Measurement, st.just(COMPLETION), st.sampled_from(["a", "b"]),
              st.floats(0.01, 1), st.integers(1, 5000), st.floats(0, 1e4)),
)


@given(st.lists(_record, max_size=30, unique_by=lambda r: r.key))
def test_csv_round_trip(records):
    ms = MeasurementSet("sys", tuple(records))
    again = parse_csv(format_csv(ms.records), "sys")
    assert again == ms
