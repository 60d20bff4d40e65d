"""
Kraus operators, Choi matrices and the canonical constructors
=============================================================

Channels are stored as Kraus lists. The Choi matrix is the gauge-free
representation: two channels are equal exactly when their Choi matrices are.
"""

# %%
from prodchan import channels as chn
from prodchan import corpus, states

# %%
# Standard noise, applied to the excited qubit state.
damp = corpus.noise_zoo("amplitude_damping", 2, 0.3)
excited = states.pure_state([0, 1])
print(chn.apply(damp, excited).mat.real)

# %%
# Choi <-> Kraus is a round trip up to the Kraus gauge.
ch = corpus.random_channel(3, 2, kraus_count=3, seed=4)
back = chn.choi_to_kraus(chn.choi(ch))
print(len(ch.kraus), "->", len(back.kraus), "Kraus operators; Choi distance", chn.channel_distance(ch, back))

# %%
# validate() reports how far a Kraus list is from a channel.
print(chn.validate(ch))
print(chn.validate(chn.KrausChannel.from_kraus([0.9 * chn.identity_channel(2).kraus[0]])))

# %%
# The four ways a channel can keep product states product.
d_a, d_b = 2, 3
local = chn.tensor_channel(corpus.random_channel(2, 2, 2, 0), corpus.random_channel(3, 3, 2, 1))
flipped = chn.flip_channel(corpus.random_channel(2, 3, 2, 2), corpus.random_channel(3, 2, 2, 3))
sigma = states.random_density(2, 1, 5)
fixed_a = chn.fixed_a_channel(sigma, corpus.random_channel(6, 3, 2, 6))
tau = states.random_density(3, 2, 7)
fixed_b = chn.fixed_b_channel(corpus.random_channel(6, 2, 3, 8), tau)

rho, delta = states.random_density(2, 2, 9), states.random_density(3, 3, 10)
for name, c in [("local", local), ("flip", flipped), ("fixed A", fixed_a), ("fixed B", fixed_b)]:
    out = chn.apply(c, states.product_state(rho, delta))
    print(f"{name:8s} valid={chn.validate(c).accepted}  output product distance {states.product_distance(out):.1e}")
