"""Online monitoring: verdicts resolve as samples arrive.

A verdict at time t depends on the trace up to t + horizon, so after pushing
samples up to time T the verdict is known on [0, T - horizon].  Polling
returns the newly resolved slice; after end-of-stream the assembled output
equals the offline verdict exactly.
"""

import numpy as np

from sclmon import StreamingMonitor, monitor, parse, PiecewiseConstantSignal

f = parse("<flat[0,4], 0.5> (v >= 0)")   # horizon 4
print(f"monitoring  <flat[0,4], 0.5> (v >= 0)   (horizon 4)\n")

rng = np.random.default_rng(7)
times = np.arange(0.0, 13.0)
values = rng.uniform(-1, 1, (len(times), 1))

sm = StreamingMonitor(f, ("v",))
for t, row in zip(times, values):
    sm.push(float(t), row)
    piece = sm.poll()
    if piece is None:
        print(f"push t={t:4.1f}  -> nothing resolved yet")
    else:
        segs = ", ".join(f"[{s:.2f},{e:.2f}]" for s, e in piece.intervals) or "none"
        print(f"push t={t:4.1f}  -> resolved up to {piece.end:.2f}; new true: {segs}")

sm.finish(float(times[-1]))
final = sm.poll()
print(f"\nfinish      -> resolved up to {sm.resolved_signal().end:.2f}")

offline = monitor(
    PiecewiseConstantSignal(("v",), times, values, float(times[-1])), f).signal
assert sm.resolved_signal() == offline
print("assembled online output == offline verdict:", sm.resolved_signal() == offline)
print("true intervals:", [(round(s, 4), round(e, 4)) for s, e in offline.intervals])
