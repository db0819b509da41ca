from .losses import (
    LossReport,
    auto_loss,
    combined_generator_loss,
    denoise_pretrain_loss,
    freq_loss,
    gan_reference_losses,
    nll_seq2seq_loss,
    wgan_losses,
)
