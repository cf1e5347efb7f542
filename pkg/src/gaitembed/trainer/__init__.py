"""Triplet-loss training of the gait embedder: PK sampling, Adam, checkpoints and history"""
from gaitembed.trainer.checkpoint import load_checkpoint, load_checkpoint_with_header, save_checkpoint
from gaitembed.trainer.config import TrainConfig, resolve_pk
from gaitembed.trainer.history import EpochRecord, TrainHistory, write_history_csv, write_timings_csv
from gaitembed.trainer.loop import FINAL_CHECKPOINT, train, training_step, validation_ari
from gaitembed.trainer.optimizer import AdamState, adam_step
from gaitembed.trainer.sampling import sample_pk_batch
