"""From-scratch leaf-disease classifier.

Every numerical building block here (true convolution, residual dense
block, softmax, backprop, SGD) is written out explicitly over numpy
arrays; no ML framework sits underneath.
"""

from .layers import (
    conv2d,
    conv2d_backward,
    cross_entropy,
    dense,
    dense_backward,
    maxpool2,
    maxpool2_backward,
    relu,
    relu_backward,
    residual_dense,
    residual_dense_backward,
    softmax,
    softmax_cross_entropy_grad,
)
from .model import LeafClassifier, glorot_uniform, load_model, save_model
from .train import ConfusionMatrix, TrainingHistory, evaluate, train
from .data import generate_leaf_dataset, split_dataset
from .gradcheck import GradCheckReport, grad_check
from .pipeline import (
    PipelineCycle,
    PredictionResult,
    classify_frame,
    lesion_box,
    predict_once,
    predict_pipeline,
    preprocess,
)

__all__ = [
    "ConfusionMatrix",
    "GradCheckReport",
    "LeafClassifier",
    "PipelineCycle",
    "PredictionResult",
    "TrainingHistory",
    "conv2d",
    "conv2d_backward",
    "cross_entropy",
    "dense",
    "dense_backward",
    "evaluate",
    "generate_leaf_dataset",
    "glorot_uniform",
    "grad_check",
    "classify_frame",
    "lesion_box",
    "load_model",
    "maxpool2",
    "maxpool2_backward",
    "predict_once",
    "predict_pipeline",
    "preprocess",
    "relu",
    "relu_backward",
    "residual_dense",
    "residual_dense_backward",
    "save_model",
    "softmax",
    "softmax_cross_entropy_grad",
    "split_dataset",
    "train",
]
