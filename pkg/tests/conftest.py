import pytest

from mpisac import beamform, channel, scenario


@pytest.fixture(scope="session")
def default_sc():
    return scenario.default_scenario()


@pytest.fixture(scope="session")
def default_channels(default_sc):
    return channel.synthesize_channels(default_sc)


@pytest.fixture(scope="session")
def default_table(default_channels):
    return beamform.mode_table(default_channels)


@pytest.fixture()
def tiny_sc():
    """Two radars, three antennas; small enough to reason about by hand."""
    return scenario.scenario_from_dict({
        "seed": 0,
        "params": {
            "K": 2, "M": 3, "P_T": 0.01, "P_sum": 0.05,
            "sigma2": 1e-8, "gamma": 1000.0,
        },
        "geometry": {
            "room_bounds": [[0.0, 0.0, 0.0], [3.0, 4.5, 3.0]],
            "dfr_positions": [[2.35, 0.05, 1.5], [0.05, 2.39, 1.5]],
            "target_position": [1.5, 2.25, 1.5],
            "receiver_position": [0.33, 3.35, 1.5],
        },
        "errors": {"P": [0.05, 0.09], "Q": [0.09, 0.14]},
    })
