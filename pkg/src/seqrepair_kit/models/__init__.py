from .base_model import ParameterStore
from .generator import RnnState, Seq2SeqGenerator, SoftBatch, lstm_cell
from .critic import ConvCritic, conv1d, critic_input, one_hot
from .inference import generate_soft, repair, score_pairs
