"""The audio perturbation suite: additive noise, mu-law, MP3 hook.

Perturbations target test audio only; reference material stays clean.
Everything is seed-deterministic so robustness tables reproduce exactly.
"""

import shutil

import numpy as np

import phonoprint as pp

rate = 16000
t = np.arange(2 * rate) / rate
speech_like = pp.AudioTrack(
    samples=0.5 * np.sin(2 * np.pi * 220 * t) * (1 + 0.3 * np.sin(2 * np.pi * 3 * t))
)

print("additive Gaussian noise at target SNR:")
for snr_db in (25, 20, 15, 10):
    noisy = pp.add_awgn(speech_like, snr_db, seed=42)
    measured = pp.measure_snr(speech_like, noisy)
    print(f"  target {snr_db:>2} dB -> measured {measured:.2f} dB")

print("\n8-bit mu-law companding round trip:")
degraded = pp.mulaw_roundtrip(speech_like)
print(f"  round-trip SNR: {pp.measure_snr(speech_like, degraded):.1f} dB")
print(f"  max sample error: {np.abs(degraded.samples - speech_like.samples).max():.5f}")

print("\nnormalization (applied before feature extraction):")
normed = pp.normalize(speech_like)
print(f"  mean {normed.samples.mean():+.2e}, std {normed.samples.std():.6f}")

print("\nMP3 round trip (external encoder hook):")
if shutil.which("ffmpeg") or shutil.which("lame"):
    out = pp.mp3_roundtrip_external(speech_like)
    print(f"  round-trip SNR: {pp.measure_snr(speech_like, out):.1f} dB")
else:
    print("  no ffmpeg/lame on PATH; the perturbation reports EncoderMissing")
    print("  and evaluations mark the condition as skipped.")

# WAV bytes round-trip for interchange with other tools.
blob = pp.write_wav(degraded)
again = pp.read_wav(blob)
print(f"\nWAV round trip: {len(blob)} bytes, {len(again)} samples back")
