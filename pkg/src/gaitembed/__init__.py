"""Gait embeddings from skeleton sequences trained with a triplet loss"""
__version__ = '0.1.0'
