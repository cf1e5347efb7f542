"""Clustering, agreement scoring, 2D projection and plotting of embeddings"""
from gaitembed.analysis.ari import ari, contingency_table
from gaitembed.analysis.kmeans import ClusterAssignment, kmeans, kmeans_plusplus
from gaitembed.analysis.scoring import cluster_and_score, raw_baseline_ari
from gaitembed.analysis.tsne import (
    Projection2D,
    conditional_affinities,
    conditional_perplexity,
    joint_affinities,
    squared_distances,
    tsne,
)
from gaitembed.analysis.plot import PALETTE, emit_scatter_svg, render_scatter_svg
from gaitembed.analysis.export import (
    read_embeddings_csv,
    read_projection_csv,
    write_clusters_csv,
    write_embeddings_csv,
    write_projection_csv,
    write_run_embeddings_csv,
)
