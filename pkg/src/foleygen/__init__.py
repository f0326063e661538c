"""foleygen: desk-scale video-to-audio generation.

Tri-modal contrastive encoders align video, audio and text in one
embedding space; a latent diffusion model over mel spectrograms
generates audio conditioned on fused video/text features; guided
sampling (classifier-free, classifier, and multi-condition composition)
steers inference. Everything trains on a procedurally generated
audio-visual-text corpus with known ground truth.
"""

__version__ = "0.1.0"
