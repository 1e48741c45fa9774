#pragma once

#include <string_view>

namespace drugrec::detail {

std::string_view embedded_stopwords();
std::string_view embedded_lemma_exceptions();
std::string_view embedded_sentiment_lexicon();

}  // namespace drugrec::detail
