"""End-to-end tracking on a few sequences, clean and noisy.

The matched-filter detector correlates a disk template with every frame,
extracts sub-pixel landmarks at three pyramid scales (B), integer argmax
positions (H), and physics-refined windows (P) with velocities and bounce
indicators.  With sigma=1 the ball is invisible to the eye; the
temporal-mean flag cancels the static noise and restores clean accuracy.
"""

from balltrack import SimConfig
from balltrack.tracker import evaluate, evaluate_sequences, track_sequence
from balltrack.video import generate_sequence, split_stream

N = 8

for sigma, tmean in ((0.0, False), (1.0, False), (1.0, True)):
    cfg = SimConfig(noise_sigma=sigma)
    per_seq = []
    for i in range(N):
        seq = generate_sequence(cfg, split_stream(cfg, "test", i))
        preds = track_sequence(seq, cfg, temporal_mean=tmean)
        per_seq.append(evaluate(preds, seq.trajectory))
    table = evaluate_sequences(per_seq)
    flag = " + temporal-mean" if tmean else ""
    print(f"\nsigma={sigma:g}{flag}  ({N} sequences, mean L1 errors)")
    print("  scale   B [px]   H [px]   P [px]   V [px/f]  bounce")
    for s in (56, 112, 224):
        print(
            f"  {s:5d} {table.values[f'B{s}']:8.3f} {table.values[f'H{s}']:8.3f}"
            f" {table.values[f'P{s}']:8.3f} {table.values[f'V{s}']:9.3f}"
            f" {table.values[f'bounce{s}']:7.3f}"
        )

print(
    "\nnotes: raw sigma=1 tracking fails (the matched filter cannot see "
    "through static noise of the same amplitude as the ball), while the "
    "temporal-mean variant matches the clean runs; 56-scale positions carry "
    "the average-pooling offset bias of the heatmap pyramid."
)
