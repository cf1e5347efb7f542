"""Training loop: PK batches, forward, online mining, triplet loss, backward, Adam"""
import logging
import os
import time

import numpy as np

from gaitembed.analysis import ari, kmeans
from gaitembed.autodiff import Graph, backward
from gaitembed.embedder import build_forward, embed_batch, init_embedder, stack_sequences
from gaitembed.errors import CheckpointIoError, InsufficientData, NoTriplets
from gaitembed.trainer.checkpoint import save_checkpoint
from gaitembed.trainer.history import EpochRecord, TrainHistory
from gaitembed.trainer.optimizer import AdamState, adam_step
from gaitembed.trainer.sampling import sample_pk_batch
from gaitembed.triplet import batch_triplet_loss
from utils.common import derive_seeds
from utils.logging_decorators import log_duration


log = logging.getLogger(__name__)

FINAL_CHECKPOINT = 'final.ckpt'


def checkpoint_name(epoch):
    """File name of the scheduled checkpoint written after epoch"""
    return f'epoch-{epoch:04d}.ckpt'


def validation_ari(params, sequences, seed):
    """K-means (k = number of labels) ARI of the embedded sequences, or None when not computable"""
    label_count = len({sequence.label for sequence in sequences})
    if len(sequences) < 2:
        return None
    batch = embed_batch(params, sequences)
    assignment = kmeans(batch.matrix, label_count, seed)
    return ari(batch.labels, assignment.labels)


def training_step(params, state, batch, config, mining_rng):
    """One optimizer step on a PK batch; returns (params, state, loss, triplet count)

    Raises NoTriplets when mining finds nothing, in which case nothing is updated.
    """
    graph = Graph()
    embeddings = build_forward(graph, params, stack_sequences(batch, config.seq_len))
    loss, triplets = batch_triplet_loss(
        embeddings, [sequence.label for sequence in batch], config.mining_strategy(), mining_rng)
    graph.set_loss(loss)
    grads = backward(graph)
    tensors, state = adam_step(params.tensors, grads, state, config.learning_rate)
    return type(params)(params.config, tensors), state, float(loss.data), len(triplets)


def _prepare_run_dir(run_dir):
    if run_dir is None:
        return
    try:
        os.makedirs(run_dir, exist_ok=True)
    except OSError as error:
        raise CheckpointIoError(f"cannot create run directory '{run_dir}': {error}") from error


@log_duration(log, 'training')
def train(split, config, run_dir=None):
    """Trains an embedder on split.train; returns (EmbedderParams, TrainHistory)

    Each epoch runs floor(len(train) / N) PK batches. Validation ARI is recorded every
    config.eval_every epochs and after the last one. With a run directory, checkpoints are
    written every config.checkpoint_every epochs and as final.ckpt at the end.
    (split, config) fully determine the result.
    """
    init_seed, sampling_seed, mining_seed, eval_seed = derive_seeds(config.seed, 4)
    params = init_embedder(config.embedder_config(), init_seed)
    state = AdamState.zeros_like(params.tensors)
    history = TrainHistory()
    _prepare_run_dir(run_dir)
    if config.epochs == 0:
        if run_dir is not None:
            save_checkpoint(params, state, os.path.join(run_dir, FINAL_CHECKPOINT), config)
        return params, history

    steps_per_epoch = len(split.train) // config.batch_size
    if steps_per_epoch == 0:
        raise InsufficientData(
            f"{len(split.train)} training sequences cannot fill a batch of {config.batch_size}")
    sampling_rng = np.random.default_rng(sampling_seed)
    mining_rng = np.random.default_rng(mining_seed)
    log.info(f"Training {params} for {config.epochs} epochs of {steps_per_epoch} steps, {config}")

    for epoch in range(1, config.epochs + 1):
        started = time.perf_counter()
        losses, triplet_count, skipped = [], 0, 0
        for _ in range(steps_per_epoch):
            batch = sample_pk_batch(split.train, config.labels_per_batch,
                                    config.sequences_per_label, sampling_rng)
            try:
                params, state, loss, mined = training_step(params, state, batch, config, mining_rng)
            except NoTriplets:
                skipped += 1
                log.debug(f"Epoch {epoch}: no triplets mined, step skipped")
                continue
            losses.append(loss)
            triplet_count += mined
        history.step_losses.extend(losses)

        score = None
        if config.eval_every and (epoch % config.eval_every == 0 or epoch == config.epochs):
            score = validation_ari(params, split.validation, eval_seed)
        mean_loss = float(np.mean(losses)) if losses else None
        history.append(EpochRecord(epoch, mean_loss, triplet_count, steps_per_epoch - skipped,
                                   skipped, score, time.perf_counter() - started))
        log.info(f"Epoch {epoch}/{config.epochs}: loss={mean_loss}, triplets={triplet_count}, "
                 f"skipped={skipped}" + (f", validation ARI={score:.4f}" if score is not None else ''))

        if run_dir is not None and config.checkpoint_every and epoch % config.checkpoint_every == 0:
            save_checkpoint(params, state, os.path.join(run_dir, checkpoint_name(epoch)), config)

    if run_dir is not None:
        save_checkpoint(params, state, os.path.join(run_dir, FINAL_CHECKPOINT), config)
    return params, history
