"""Simulation and cryptanalysis of a keyed alternating-parity polarization cipher."""
from .analysis import JointCounts, SweepResult, delta_I, intensity_sweep, key_consumption, mutual_information
from .channel import (
    MeasurementRecord,
    RngHandle,
    angular_distance,
    count_dual_basis,
    count_single_basis,
    estimate_angle,
    gaussian_angle_channel,
)
from .cryptanalysis import (
    InconsistentSystemError,
    LinearSystem,
    RecoveredKey,
    build_system,
    decrypt_with_seed,
    observed_keystream_bits,
    seed_functional,
    solve_seed,
)
from .encoding import ChannelModel, ProtocolParams, PulseRecord, basis_parity, encode_angle, encode_stream
from .keystream import BasisIndex, InvalidStateError, Keystream, SeedKey, expand_key, lfsr_step, next_basis_index
from .receivers import (
    Transcript,
    bob_measure_then_decode,
    bob_parity_decode,
    eve_threshold_decode,
    run_protocol,
)

__version__ = "0.1.0"
