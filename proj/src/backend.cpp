#include "dore/backend.hpp"

#include "dore/error.hpp"
#include "dore/http_backend.hpp"
#include "dore/mock_backend.hpp"

namespace dore {

std::unique_ptr<Backend> open_backend(const std::string& descriptor) {
  if (descriptor.rfind("mock:", 0) == 0)
    return std::make_unique<MockBackend>(MockScript::from_file(descriptor.substr(5)));
  if (descriptor.rfind("http://", 0) == 0 || descriptor.rfind("https://", 0) == 0)
    return std::make_unique<HttpBackend>(descriptor);
  if (descriptor.rfind("http:", 0) == 0)
    return std::make_unique<HttpBackend>(descriptor.substr(5));
  fail(ErrorCode::unsupported,
       "unsupported backend descriptor \"" + descriptor + "\" (use mock:PATH or http:URL)");
}

}  // namespace dore
