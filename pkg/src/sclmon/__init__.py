"""Monitoring engine for signal convolution logic over piecewise-constant traces.

The windowed operator ``<kernel[T0,T1], p>`` holds at time t when the
kernel-weighted fraction of ``[t+T0, t+T1]`` on which its subformula holds is
at least p; the starred form requires strictly more than p.  This package
provides Boolean monitoring (event-aligned sliding-window integration with a
brute-force oracle and incremental semigroup variants), streaming monitoring,
quantitative robustness, a formula text syntax, trace generators and a CLI.
"""

from .errors import HorizonError, ParseError, SclError, TraceError
from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    Conv,
    ConvDual,
    Formula,
    Implies,
    Not,
    Or,
    desugar,
    eventually,
    formula_size,
    globally,
    horizon,
    variables,
)
from .kernels import (
    BoundedKernel,
    ExponentialKernel,
    FlatKernel,
    GaussianKernel,
    evaluate,
    integral,
    weighted_integral,
)
from .monitor import (
    ConvEvaluation,
    MonitorConfig,
    VerdictSignal,
    eval_atom,
    eval_conv_efficient,
    eval_conv_incremental,
    eval_conv_oracle,
    monitor,
)
from .parser import parse, parse_formula_file, pretty_print
from .robustness import RhoConfig, RobustnessTrace, rho, rho_trace
from .signals import (
    BooleanSignal,
    Interval,
    PiecewiseConstantSignal,
    boolean_and,
    boolean_not,
    boolean_or,
    decompose,
    restrict_domain,
)
from .streaming import StreamingMonitor
from .traces import (
    GlucoseParams,
    add_noise,
    generate_glucose_like,
    generate_sine_quantized,
    generate_step_train,
    read_trace_csv,
    trace_to_csv,
    write_trace_csv,
)

__all__ = [
    "And", "Atom", "BooleanSignal", "BoundedKernel", "Const", "Conv",
    "ConvDual", "ConvEvaluation", "ExponentialKernel", "FALSE", "FlatKernel",
    "Formula", "GaussianKernel", "GlucoseParams", "HorizonError", "Implies",
    "Interval", "MonitorConfig", "Not", "Or", "ParseError",
    "PiecewiseConstantSignal", "RhoConfig", "RobustnessTrace", "SclError",
    "StreamingMonitor", "TRUE", "TraceError", "VerdictSignal", "add_noise",
    "boolean_and", "boolean_not", "boolean_or", "decompose", "desugar",
    "eval_atom", "eval_conv_efficient", "eval_conv_incremental",
    "eval_conv_oracle", "evaluate", "eventually", "formula_size",
    "generate_glucose_like", "generate_sine_quantized", "generate_step_train",
    "globally", "horizon", "integral", "monitor", "parse",
    "parse_formula_file", "pretty_print", "read_trace_csv", "restrict_domain",
    "rho", "rho_trace", "trace_to_csv", "variables", "weighted_integral",
    "write_trace_csv",
]

__version__ = "0.1.0"
