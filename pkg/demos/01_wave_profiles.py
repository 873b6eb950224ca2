"""Sample the centred rarefaction, its smoothed approximation and a contact wave.

Prints a few values and the decay envelopes of the smoothed profile.
"""
import numpy as np

from rarelab import ConvexFlux, contact_wave, profile_dx, profile_value, rarefaction, smoothed_rarefaction
from rarelab.wave_profiles import profile_envelopes

flux = ConvexFlux.burgers()
fan = rarefaction(flux, -1.0, 1.0)
smooth = smoothed_rarefaction(flux, -1.0, 1.0, q=1.0)
x = np.linspace(-4.0, 4.0, 9)

print("x          fan(t=2)   smoothed(t=2)  d/dx smoothed")
for xi, a, b, c in zip(x, profile_value(fan, 2.0, x), profile_value(smooth, 2.0, x), profile_dx(smooth, 2.0, x)):
    print(f"{xi:+6.2f}  {a:+10.5f}  {b:+13.5f}  {c:13.5f}")

heat = contact_wave(0.0, 1.0, mu=1.0)
print("\ncontact wave at t=1, x=0:", float(profile_value(heat, 1.0, 0.0)))

rep = profile_envelopes(flux, 1.0, -1.0, 1.0, np.geomspace(10, 1e3, 20))
for line in rep.lines:
    print(f"{line.label:<10} fitted {line.fitted:+.3f}  bound {line.theoretical:+.3f}")
