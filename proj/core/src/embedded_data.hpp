#pragma once

namespace licremedy::embedded {

// Generated at configure time from core/data.
extern const char* const kMatrix16Json;
extern const char* const kKeywordsJson;
extern const char* const kClassifiersJson;

}  // namespace licremedy::embedded
