int x;
int y;
pthread_mutex_t mx = PTHREAD_MUTEX_INITIALIZER;

void *w(void *arg) {
  pthread_mutex_lock(&mx);
  x = x + 1;
  pthread_mutex_unlock(&mx);
  y = 1;
  return 0;
}

int main() {
  pthread_t t;
  pthread_create(&t, 0, w, 0);
  pthread_mutex_lock(&mx);
  x = 5;
  pthread_mutex_unlock(&mx);
  y = 2;
  pthread_join(t, 0);
  return x + y;
}
