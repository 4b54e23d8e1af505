"""Values of Carmichael's lambda function: membership, exact counting and constructions."""

from .arith import (
    Factorization,
    PrimeTables,
    build_tables,
    carmichael_lambda,
    divisors,
    euler_phi,
    factor,
    is_carmichael_number,
    lambda_prime_power,
    lcm_checked,
    mobius,
    omega,
    tau_k,
)
from .engine import count_segment, count_up_to, resume
from .oracle import (
    MaxPreimageProfile,
    brute_force_image,
    is_lambda_value,
    max_lambda_divisor,
    max_witness,
)
from .series import CountCheckpoint, CountSeries

__version__ = "0.1.0"

__all__ = [
    "CountCheckpoint",
    "CountSeries",
    "Factorization",
    "MaxPreimageProfile",
    "PrimeTables",
    "brute_force_image",
    "build_tables",
    "carmichael_lambda",
    "count_segment",
    "count_up_to",
    "divisors",
    "euler_phi",
    "factor",
    "is_carmichael_number",
    "is_lambda_value",
    "lambda_prime_power",
    "lcm_checked",
    "max_lambda_divisor",
    "max_witness",
    "mobius",
    "omega",
    "resume",
    "tau_k",
]
